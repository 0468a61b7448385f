import typing as t
from contextlib import contextmanager

import click

#: Display names of the methods, in table order.
METHOD_LABELS = {
    "sc": "SC",
    "ssc_l1_relax": "SSC(l1+relax)",
    "ssc_l1": "SSC(l1+Gr)",
    "ssc_mcp": "SSC(MCP+Gr)",
    "ssc_scad": "SSC(SCAD+Gr)",
}


def term_len(text: str) -> int:
    return len(click.unstyle(text))


def measure_table(rows: t.Iterable[t.Sequence[str]]) -> t.Tuple[int, ...]:
    widths: t.Dict[int, int] = {}

    for row in rows:
        for idx, col in enumerate(row):
            widths[idx] = max(widths.get(idx, 0), term_len(col))

    return tuple(y for x, y in sorted(widths.items()))


def iter_rows(
    rows: t.Iterable[t.Sequence[str]], col_count: int
) -> t.Iterator[t.Tuple[str, ...]]:
    for row in rows:
        row = tuple(row)
        yield row + ("",) * (col_count - len(row))


def score_cell(mean: float, std: float) -> str:
    """A table cell in the ``mean (std)`` layout, e.g. ``0.732 (0.000)``."""
    return f"{mean:.3f} ({std:.3f})"


class ScoreEntry(t.NamedTuple):
    method: str
    dataset: str
    nmi_mean: float
    nmi_std: float
    ari_mean: float
    ari_std: float
    #: Marks published reference numbers.
    reference: bool = False


class TableFormatter:
    """Writes aligned plain text tables into memory.

    :param indent_increment: the additional increment for each level.
    :param col_spacing: spaces between two columns.
    """

    def __init__(self, indent_increment: int = 2, col_spacing: int = 2) -> None:
        self.indent_increment = indent_increment
        self.col_spacing = col_spacing
        self.current_indent = 0
        self.buffer: t.List[str] = []

    def write(self, string: str) -> None:
        self.buffer.append(string)

    def indent(self) -> None:
        self.current_indent += self.indent_increment

    def dedent(self) -> None:
        self.current_indent -= self.indent_increment

    def write_heading(self, heading: str) -> None:
        self.write(f"{'':>{self.current_indent}}{heading}:\n")

    def write_table(
        self, header: t.Sequence[str], rows: t.Sequence[t.Sequence[str]]
    ) -> None:
        """Write ``rows`` under ``header``. The first column is left
        aligned, all others right aligned.
        """
        all_rows = [tuple(header)] + [tuple(row) for row in rows]
        widths = measure_table(all_rows)
        spacing = " " * self.col_spacing

        for number, row in enumerate(iter_rows(all_rows, len(widths))):
            cells = []

            for idx, (col, width) in enumerate(zip(row, widths)):
                pad = " " * (width - term_len(col))
                cells.append(col + pad if idx == 0 else pad + col)

            line = spacing.join(cells).rstrip()
            self.write(f"{'':>{self.current_indent}}{line}\n")

            if number == 0:
                rule = "-" * (sum(widths) + self.col_spacing * (len(widths) - 1))
                self.write(f"{'':>{self.current_indent}}{rule}\n")

    def write_scores(self, entries: t.Sequence[ScoreEntry]) -> None:
        """Write a method x dataset table of NMI and ARI cells. Methods
        and datasets appear in the order they are first seen; published
        reference rows are marked with ``*``.
        """
        datasets = list(dict.fromkeys(e.dataset for e in entries))
        methods = list(dict.fromkeys((e.method, e.reference) for e in entries))
        cells = {(e.method, e.reference, e.dataset): e for e in entries}
        header = [""]

        for name in datasets:
            header.extend([f"{name} NMI", f"{name} ARI"])

        rows = []

        for method, reference in methods:
            label = METHOD_LABELS.get(method, method)
            row = [f"{label} *" if reference else label]

            for name in datasets:
                entry = cells.get((method, reference, name))

                if entry is None:
                    row.extend(["-", "-"])
                else:
                    row.append(score_cell(entry.nmi_mean, entry.nmi_std))
                    row.append(score_cell(entry.ari_mean, entry.ari_std))

            rows.append(row)

        self.write_table(header, rows)

        if any(reference for _method, reference in methods):
            self.write(f"{'':>{self.current_indent}}* published scores\n")

    @contextmanager
    def section(self, name: str) -> t.Iterator[None]:
        self.write_heading(name)
        self.indent()

        try:
            yield
        finally:
            self.dedent()

    def getvalue(self) -> str:
        return "".join(self.buffer)
