"""Generate judging-server fixtures for the frontend integration tests.

Creates two independent task sets under the given directory:

  parity/   6 tasks plus mock-judge records for the same comparisons
  resume/   6 tasks for the kill-and-restart scenario

All paths inside the generated files are absolute, so the server can be
started from any working directory.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from texcurve.cli import main as texcurve_main
from texcurve.image_core import RgbaImage
from texcurve.pairwise_eval.grid import save_png

METHODS = ("alpha", "beta", "gamma")
SAMPLES = ("s1", "s2")
MOCK_ORDER = "beta,alpha,gamma"
SEED = 0
DIMENSION = "local_quality"


def _write_image(rng: np.random.Generator, path: Path) -> None:
    pixels = rng.integers(0, 256, size=(12, 12, 4), dtype=np.uint8)
    pixels[..., 3] = 255
    path.parent.mkdir(parents=True, exist_ok=True)
    save_png(RgbaImage(np.ascontiguousarray(pixels)), path)


def _make_inputs(root: Path) -> tuple[Path, Path]:
    rng = np.random.default_rng(4242)
    methods = []
    for method in METHODS:
        samples = {}
        for sample in SAMPLES:
            paths = []
            for view in range(4):
                p = root / "renders" / method / sample / f"v{view}.png"
                _write_image(rng, p)
                paths.append(str(p))
            samples[sample] = paths
        methods.append({"method_id": method, "samples": samples})
    spec = root / "methods.json"
    spec.write_text(json.dumps({"schema": "methods/1", "methods": methods}))
    refs = root / "refs"
    for sample in SAMPLES:
        _write_image(rng, refs / f"{sample}.png")
    return spec, refs


def _run(args: list[str]) -> None:
    rc = texcurve_main(args)
    if rc != 0:
        raise SystemExit(f"fixture command failed with {rc}: {args}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_dir", help="directory to populate")
    args = parser.parse_args()
    out = Path(args.out_dir).resolve()

    for scenario in ("parity", "resume"):
        root = out / scenario
        root.mkdir(parents=True, exist_ok=True)
        spec, refs = _make_inputs(root)
        _run([
            "tasks",
            "--methods", str(spec),
            "--reference", str(refs),
            "--grid-dir", str(root / "grids"),
            "--dimension", DIMENSION,
            "--seed", str(SEED),
            "--out", str(root / "tasks.jsonl"),
        ])

    # records the scripted judge would produce for the parity comparisons
    parity = out / "parity"
    _run([
        "evaluate",
        "--methods", str(parity / "methods.json"),
        "--reference", str(parity / "refs"),
        "--grid-dir", str(parity / "grids_mock"),
        "--dimension", DIMENSION,
        "--seed", str(SEED),
        "--judge", "mock",
        "--mock-order", MOCK_ORDER,
        "--out", str(parity / "mock_records.jsonl"),
    ])
    print(f"fixtures ready under {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
