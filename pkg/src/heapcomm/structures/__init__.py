"""Example data structures: counter, two-set, linked stack and stack-with-size."""

from .common import (ARG_A, ARG_B, BOOLS, CELL_POOL, CTR_P, JUNK_ADDRS, OUT_R, OUT_S, SET_P, SET_Q,
                     STK_L, Op, all_values, finite_values, int_alphabet, load_source, make_addr,
                     nat_values, nonnull_values, shipped)
from .compound import CompoundBundle, make_compound
from .counter import CounterBundle, make_ctr, make_ctr_domain
from .generate import (Case, UnsupportedAbstraction, gen_heap_sets, gen_purview_heaps, generate,
                       junk_frames, pick_frames)
from .stack import StackBundle, layout, make_stack, make_stack_domain, walk
from .tables import SCOPES, LemmaPart, TableRow, all_rows, find_row, product_of, table
from .twoset import (TwoSetBundle, make_set_domain, make_setq_domain, make_twoset, setq_bijection,
                     show_set)
