"""CSV emission and run manifests.

Every float is written with 17 significant digits so doubles round-trip
exactly and repeated runs diff cleanly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [[float(v) if v else None for v in row] for row in reader]


def write_spectrum(path, grid):
    rows = zip(grid.delta, grid.T, grid.R, grid.t.real, grid.t.imag,
               grid.r.real, grid.r.imag)
    return write_csv(path, ["delta", "T", "R", "t_re", "t_im", "r_re", "r_im"], rows)


def write_modes(path, modes):
    rows = (
        (n + 1, c, w, e.real, e.imag, x.real, x.imag)
        for n, (c, w, e, x) in enumerate(zip(modes.centers, modes.widths, modes.eta, modes.xi))
    )
    return write_csv(path, ["n", "center", "width", "eta_re", "eta_im", "xi_re", "xi_im"], rows)


def write_aah(path, eig):
    rows = ((n + 1, e, p) for n, (e, p) in enumerate(zip(eig.energies, eig.iprs())))
    return write_csv(path, ["n", "E", "ipr"], rows)


def write_dips(path, dips):
    return write_csv(path, ["center", "width", "depth"],
                     ((d.center, d.width, d.depth) for d in dips))


def write_localization(path, reports):
    header = ["v0", "sigma2", "ipr_decay", "aah_ground_ipr", "sigma2_lossy", "ipr_decay_lossy"]
    rows = ((r.v0, r.sigma2, r.ipr_decay, r.aah_ground_ipr, r.sigma2_lossy, r.ipr_decay_lossy)
            for r in reports)
    return write_csv(path, header, rows)


def write_butterfly(path, bmap):
    header = ["beta"] + [fmt(d) for d in bmap.delta]
    rows = ([b, *row] for b, row in zip(bmap.betas, bmap.T))
    return write_csv(path, header, rows)


@dataclass
class RunManifest:
    command: str
    config: dict
    options: dict
    outputs: list = field(default_factory=list)
    version: str = ""
    duration_s: float = 0.0

    def to_json(self):
        return json.dumps(
            {
                "command": self.command,
                "config": self.config,
                "options": self.options,
                "outputs": self.outputs,
                "version": self.version,
                "duration_s": self.duration_s,
            },
            indent=2,
            sort_keys=True,
        )

    def write(self, path):
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path):
        data = json.loads(Path(path).read_text())
        return cls(**data)
