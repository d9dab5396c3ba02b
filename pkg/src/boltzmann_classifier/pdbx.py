"""Minimal fixed-column PDB reader and the six-ligand Co bond-distance featurizer.

Ligand selection defaults: any non-Co, non-hydrogen atom; the six nearest
within ``cutoff`` angstrom; distances sorted ascending so the feature
vector does not depend on atom order or pose.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np

from .exceptions import ParameterError, PDBParseError

log = logging.getLogger(__name__)

N_LIGANDS = 6
DEFAULT_CUTOFF = 3.0
COBALT = "CO"
HYDROGENS = frozenset({"H", "D"})
FEATURE_COLUMNS = tuple(f"d{i}" for i in range(1, N_LIGANDS + 1))


@dataclass(frozen=True)
class Atom:
    serial: int
    name: str
    element: str
    x: float
    y: float
    z: float
    record: str = "HETATM"

    @property
    def coords(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class CoFeatureRecord:
    structure_id: str
    co_serial: int
    distances: tuple


@dataclass(frozen=True)
class SkippedCobalt:
    structure_id: str
    co_serial: int
    n_candidates: int

    def __str__(self):
        return (f"{self.structure_id}: Co serial {self.co_serial} skipped, "
                f"only {self.n_candidates} ligand candidate(s) within cutoff")


def _element_from_name(name_field: str) -> str:
    # PDB convention: one-letter elements leave column 13 blank (or use it
    # for a digit, e.g. "1HB "); two-letter elements start in column 13.
    if not name_field.strip():
        return ""
    if name_field[0] == " " or name_field[0].isdigit():
        letters = [c for c in name_field[1:] if c.isalpha()]
        return letters[0].upper() if letters else ""
    if len(name_field) > 1 and name_field[1].isalpha():
        return name_field[:2].upper()
    return name_field[0].upper()


def parse_pdb(text: str) -> List[Atom]:
    """Parse ATOM/HETATM records; every other record type is ignored."""
    atoms = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        record = line[:6].strip().upper()
        if record not in ("ATOM", "HETATM"):
            continue
        padded = line.ljust(80)
        try:
            x = float(padded[30:38])
            y = float(padded[38:46])
            z = float(padded[46:54])
        except ValueError:
            raise PDBParseError(
                f"line {line_no}: malformed coordinate field "
                f"{padded[30:54]!r}") from None
        if not all(np.isfinite((x, y, z))):
            raise PDBParseError(f"line {line_no}: non-finite coordinate")
        name_field = padded[12:16]
        element = padded[76:78].strip().upper() or _element_from_name(name_field)
        if not element:
            raise PDBParseError(f"line {line_no}: cannot determine element")
        try:
            serial = int(padded[6:11])
        except ValueError:
            serial = len(atoms) + 1
        atoms.append(Atom(serial, name_field.strip(), element, x, y, z, record))
    return atoms


def format_atom(atom: Atom) -> str:
    """One fixed-column PDB record (coordinates at 3 decimals)."""
    name = atom.name[:4]
    name = name.ljust(4) if len(atom.element) == 2 or len(name) == 4 else f" {name:<3}"
    return (f"{atom.record:<6}{atom.serial % 100000:>5} {name} "
            f"{'MOL':>3} A{1:>4}    "
            f"{atom.x:>8.3f}{atom.y:>8.3f}{atom.z:>8.3f}"
            f"{1.0:>6.2f}{0.0:>6.2f}          {atom.element:>2}")


def format_pdb(atoms: Iterable[Atom]) -> str:
    return "\n".join([format_atom(a) for a in atoms] + ["END"]) + "\n"


def extract_co_features(atoms: Sequence[Atom], cutoff=DEFAULT_CUTOFF,
                        include_hydrogens=False, structure_id=""):
    """Six nearest ligand distances for every cobalt atom.

    Returns ``(records, skipped)``; cobalt centres with fewer than six
    candidates within ``cutoff`` go to ``skipped`` instead of failing.
    """
    if not cutoff > 0:
        raise ParameterError(f"cutoff must be positive, got {cutoff!r}")
    cobalts = [a for a in atoms if a.element == COBALT]
    ligands = [a for a in atoms if a.element != COBALT
               and (include_hydrogens or a.element not in HYDROGENS)]
    lig_xyz = np.array([a.coords for a in ligands], dtype=np.float64).reshape(-1, 3)
    records, skipped = [], []
    for co in cobalts:
        d = np.sqrt(np.square(lig_xyz - np.asarray(co.coords)).sum(axis=1))
        d = np.sort(d[d <= cutoff])
        if d.size < N_LIGANDS:
            skipped.append(SkippedCobalt(structure_id, co.serial, int(d.size)))
            continue
        records.append(CoFeatureRecord(structure_id, co.serial,
                                       tuple(float(v) for v in d[:N_LIGANDS])))
    return records, skipped


def split_structure_name(stem: str):
    """``"<id>_<oxstate>"`` -> ``(id, oxstate)``; no underscore -> ``(stem, None)``."""
    head, sep, tail = stem.rpartition("_")
    return (head, tail) if sep and head and tail else (stem, None)


def extract_directory(pdb_dir, cutoff=DEFAULT_CUTOFF, include_hydrogens=False,
                      label_from_filename=False):
    """Featurize every ``*.pdb`` file in ``pdb_dir`` (sorted by file name).

    Returns ``(rows, skipped)`` where each row is ``(record, label)``; the
    label comes from the ``<id>_<oxstate>.pdb`` naming convention when
    ``label_from_filename`` is set.
    """
    paths = sorted(Path(pdb_dir).glob("*.pdb"))
    rows, skipped = [], []
    for path in paths:
        try:
            atoms = parse_pdb(path.read_text(encoding="utf-8"))
        except PDBParseError as exc:
            raise PDBParseError(f"{path.name}: {exc}") from None
        if label_from_filename:
            sid, label = split_structure_name(path.stem)
            if label is None:
                raise PDBParseError(
                    f"{path.name}: expected '<id>_<oxstate>.pdb' file name")
        else:
            sid, label = path.stem, None
        recs, skips = extract_co_features(atoms, cutoff, include_hydrogens, sid)
        rows.extend((r, label) for r in recs)
        skipped.extend(skips)
    for s in skipped:
        log.warning("%s", s)
    return rows, skipped


def features_csv(rows, label_column=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["structure_id", "co_serial", *FEATURE_COLUMNS]
    if label_column:
        header.append(label_column)
    writer.writerow(header)
    for record, label in rows:
        out = [record.structure_id, record.co_serial,
               *(repr(d) for d in record.distances)]
        if label_column:
            out.append(label)
        writer.writerow(out)
    return buf.getvalue()


# -- synthetic octahedral corpus -------------------------------------------------

OCTAHEDRON = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0],
                       [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=np.float64)


def random_rotation(rng) -> np.ndarray:
    """Haar-random proper rotation via QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def synthetic_octahedral_atoms(rng, bond_mean, bond_sigma=0.04,
                               angle_jitter=0.05, with_hydrogens=True):
    """One Co complex: six N/O donors, outer C shell and optional hydrogens."""
    atoms = [Atom(1, "CO1", COBALT, 0.0, 0.0, 0.0)]
    outer = []
    for direction in OCTAHEDRON:
        u = direction + rng.normal(0.0, angle_jitter, 3)
        u /= np.linalg.norm(u)
        r = rng.normal(bond_mean, bond_sigma)
        element = "N" if rng.random() < 0.5 else "O"
        atoms.append(Atom(len(atoms) + 1, f"{element}{len(atoms)}", element, *(u * r)))
        outer.append(Atom(0, "C", "C", *(u * (r + 1.45))))
        if with_hydrogens and element == "N":
            outer.append(Atom(0, "H", "H", *(u * (r + 1.01))))
    for a in outer:
        atoms.append(Atom(len(atoms) + 1, f"{a.element}{len(atoms)}", a.element,
                          a.x, a.y, a.z))
    R = random_rotation(rng)
    shift = rng.uniform(-20.0, 20.0, 3)
    xyz = np.array([a.coords for a in atoms]) @ R.T + shift
    return [Atom(a.serial, a.name, a.element, *map(float, p))
            for a, p in zip(atoms, xyz)]


SYNTHETIC_BOND_MEANS = {"CoII": 2.10, "CoIII": 1.93}


def write_synthetic_corpus(out_dir, n_per_class=30, seed=42,
                           bond_means=None, bond_sigma=0.04):
    """Write ``<id>_<oxstate>.pdb`` files with class-dependent bond lengths."""
    bond_means = dict(bond_means or SYNTHETIC_BOND_MEANS)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    i = 0
    for _ in range(n_per_class):
        for label, mean in bond_means.items():
            i += 1
            atoms = synthetic_octahedral_atoms(rng, mean, bond_sigma)
            path = out_dir / f"s{i:05d}_{label}.pdb"
            path.write_text(format_pdb(atoms), encoding="utf-8")
            paths.append(path)
    return paths
