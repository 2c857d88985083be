"""Component-count power accounting for three crossbar architectures.

Array power itself is excluded for every architecture; only the per-neuron
and per-input peripheral components are counted.
"""
import csv
import io
from dataclasses import asdict, dataclass
from enum import Enum

from .errors import ArgumentError
from .network import PRESET_TOPOLOGIES, Topology


@dataclass(frozen=True)
class ComponentPowerTable:
    """Average power per component instance, in watts."""
    im: float = 37e-6
    sigmoid_neuron: float = 8e-6
    voltage_converter: float = 24e-6
    opamp_neuron: float = 104e-6

    def __post_init__(self):
        if min(asdict(self).values()) <= 0:
            raise ArgumentError("component powers must be positive")


class ArchitectureKind(Enum):
    PROPOSED = "proposed"                   # dual column + domain-wall IM per neuron
    DUAL_ROW_CONVERTER = "dual-row"         # voltage converter per input, sigmoid per neuron
    DUAL_COLUMN_OPAMP = "dual-column-opamp"  # op-amp sigmoidal neuron per neuron

    @property
    def label(self):
        return {"proposed": "Proposed", "dual-row": "DualRowConverter",
                "dual-column-opamp": "DualColumnOpamp"}[self.value]


# published totals in mW and reductions in % (None where not reported)
PUBLISHED_TOTALS_MW = {
    "mnist": {ArchitectureKind.PROPOSED: 42.10, ArchitectureKind.DUAL_ROW_CONVERTER: 52.4,
              ArchitectureKind.DUAL_COLUMN_OPAMP: 97.52},
    "asl": {ArchitectureKind.PROPOSED: 74.5, ArchitectureKind.DUAL_ROW_CONVERTER: 126.2,
            ArchitectureKind.DUAL_COLUMN_OPAMP: 172.01},
    "cifar10": {ArchitectureKind.PROPOSED: 37.35, ArchitectureKind.DUAL_ROW_CONVERTER: 51.93,
                ArchitectureKind.DUAL_COLUMN_OPAMP: 86.32},
}
PUBLISHED_REDUCTIONS = {
    "mnist": {ArchitectureKind.DUAL_ROW_CONVERTER: 19, ArchitectureKind.DUAL_COLUMN_OPAMP: 56},
    "asl": {ArchitectureKind.DUAL_ROW_CONVERTER: 41, ArchitectureKind.DUAL_COLUMN_OPAMP: 56},
    "cifar10": {ArchitectureKind.DUAL_ROW_CONVERTER: 28, ArchitectureKind.DUAL_COLUMN_OPAMP: 56.7},
}

# memristor-bridge synapse network: reported only, never simulated
BRIDGE_NETWORK_TOTAL_W = 230e-3   # 10 inputs x 4 outputs
BRIDGE_SIGMOID_NEURON_W = 2.06e-3

# relative disagreement with a published value above which a row is flagged
FLAG_THRESHOLD = 0.01


def component_counts(arch, topo):
    topo = topo if isinstance(topo, Topology) else Topology(tuple(topo))
    arch = ArchitectureKind(arch)
    neurons = topo.neurons
    if arch is ArchitectureKind.PROPOSED:
        return {"im": neurons, "sigmoid_neuron": neurons}
    if arch is ArchitectureKind.DUAL_COLUMN_OPAMP:
        return {"opamp_neuron": neurons}
    return {"voltage_converter": sum(topo.sizes[:-1]), "sigmoid_neuron": neurons}


def total_power(counts, table=None):
    """Sum of count x per-component power, in watts."""
    table = table or ComponentPowerTable()
    powers = asdict(table)
    total = 0.0
    for key, count in counts.items():
        if key not in powers:
            raise ArgumentError(f"unknown component {key!r}")
        if count < 0:
            raise ArgumentError(f"negative count for {key!r}")
        total += count * powers[key]
    return total


def reduction_percent(p_proposed, p_reference):
    if not p_reference > 0:
        raise ArgumentError("reference power must be positive")
    return 100.0 * (p_reference - p_proposed) / p_reference


def comparison_rows(topo, preset=None, table=None):
    """Table-2 style rows for every architecture on one topology.

    Each row: dataset, topology, architecture, computed_mw, published_mw,
    deviation_pct, reduction_pct, published_reduction_pct, flag.
    """
    topo = topo if isinstance(topo, Topology) else Topology(tuple(topo))
    totals = {a: total_power(component_counts(a, topo), table) for a in ArchitectureKind}
    proposed = totals[ArchitectureKind.PROPOSED]
    rows = []
    for arch in ArchitectureKind:
        computed_mw = totals[arch] * 1e3
        published_mw = PUBLISHED_TOTALS_MW.get(preset, {}).get(arch)
        deviation = None if published_mw is None else 100.0 * (computed_mw - published_mw) / published_mw
        rows.append({
            "dataset": preset or "custom",
            "topology": str(topo),
            "architecture": arch.label,
            "computed_mw": computed_mw,
            "published_mw": published_mw,
            "deviation_pct": deviation,
            "reduction_pct": None if arch is ArchitectureKind.PROPOSED
            else reduction_percent(proposed, totals[arch]),
            "published_reduction_pct": PUBLISHED_REDUCTIONS.get(preset, {}).get(arch),
            "flag": _flag(deviation),
        })
    return rows


def _flag(deviation_pct):
    if deviation_pct is None:
        return ""
    if abs(deviation_pct) < 0.05:
        return "match"
    if abs(deviation_pct) <= 100 * FLAG_THRESHOLD:
        return "delta<1%"
    return "MISMATCH"


def preset_rows(preset, table=None):
    if preset not in PRESET_TOPOLOGIES:
        raise ArgumentError(f"unknown preset {preset!r}; choose from {', '.join(PRESET_TOPOLOGIES)}")
    return comparison_rows(PRESET_TOPOLOGIES[preset], preset, table)


COLUMNS = ["dataset", "topology", "architecture", "computed_mw", "published_mw",
           "deviation_pct", "reduction_pct", "published_reduction_pct", "flag"]


def _cell(value, key):
    if value is None:
        return "N.A"
    if key == "computed_mw":
        return f"{value:.3f}"
    if key.startswith("published_"):
        return f"{value:g}"
    if isinstance(value, float):
        text = f"{value:.2f}"
        return "0.00" if text == "-0.00" else text
    return str(value)


def format_rows(rows):
    """Rows as lists of the exact strings printed in both table and CSV."""
    return [[_cell(r[k], k) for k in COLUMNS] for r in rows]


def to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    writer.writerows(format_rows(rows))
    return buf.getvalue()


def to_table(rows, notes=True):
    cells = format_rows(rows)
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(COLUMNS)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(COLUMNS, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    if notes:
        lines.append("")
        lines.append("Array (MCA) power excluded for all architectures.")
        lines.append(f"Memristor-bridge network (10x4), reported only: total "
                     f"{BRIDGE_NETWORK_TOTAL_W * 1e3:g} mW, sigmoid neuron {BRIDGE_SIGMOID_NEURON_W * 1e3:g} mW.")
        if any(r["flag"] == "MISMATCH" for r in rows):
            lines.append("MISMATCH: computed value differs from the published one by more than "
                         f"{100 * FLAG_THRESHOLD:g}%; both are shown, neither is adjusted.")
    return "\n".join(lines)
