"""Enumeration and generation bounds shared by checks, reports and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Bounds:
    counter_max: int = 32        # Ctr values enumerated by synthesis
    gen_counter_max: int = 6     # Ctr values realized as concrete heaps
    nat_max: int = 3             # Addr^ℕ values
    set_alphabet: int = 3        # |T| for the two-set
    stack_alphabet: int = 2      # stack elements are Int(1..k)
    stack_depth: int = 4
    fresh_width: int = 2
    junk_cells: int = 2
    layouts: int = 3             # physical layouts per stack value
    frames: int = 4              # junk frames per realized heap
    partition_limit: int = 8
    footprint_cells: int = 2
    set_pairs: int = 200         # two-element heap sets for soundness

    def as_dict(self) -> dict:
        return asdict(self)

    def with_(self, **kw) -> "Bounds":
        return replace(self, **kw)

    @classmethod
    def parse(cls, text: str | None) -> "Bounds":
        """Parse ``key=val,key=val`` overrides of the defaults."""
        b = cls()
        if not text:
            return b
        names = {f.name for f in fields(cls)}
        kw = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise ValueError(f"unknown bound {item!r}; expected one of {', '.join(sorted(names))}")
            try:
                n = int(value)
            except ValueError:
                raise ValueError(f"bound {key} needs an integer, got {value!r}") from None
            if n < 0:
                raise ValueError(f"bound {key} must be non-negative")
            kw[key] = n
        return replace(b, **kw)


DEFAULT_BOUNDS = Bounds()
