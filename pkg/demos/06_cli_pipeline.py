"""Drive the command line end to end in a temporary directory.

Generates a category and a bimodule, verifies them, constructs the hull and
the conjugate, tensors with the oracle cross-check enabled, runs the Morita
certificate and the reconstruction sweep, and shows that generation is
byte-deterministic.
"""

import pathlib
import subprocess
import sys
import tempfile

PY = [sys.executable, "-m", "cstarcat.cli"]


def run(*args):
    result = subprocess.run(PY + list(args), capture_output=True, text=True)
    tail = (result.stdout or result.stderr).strip().splitlines()
    print(f"$ cstarcat {' '.join(args)}")
    for line in tail[-2:]:
        print(f"    {line}")
    print(f"    -> exit {result.returncode}")
    return result.returncode


with tempfile.TemporaryDirectory() as tmp:
    d = pathlib.Path(tmp)
    cat = d / "cat.cstar.json"
    cat2 = d / "cat2.cstar.json"
    bim = d / "bim.cstar.json"
    mod = d / "mod.cstar.json"

    run("gen", "category", "--seed", "3", "--objects", "2", "--out", str(cat))
    run("gen", "category", "--seed", "3", "--objects", "2", "--out", str(cat2))
    print(f"    deterministic: {cat.read_bytes() == cat2.read_bytes()}")
    run("verify", str(cat))
    run("construct", "hull", str(cat), "--out", str(d / "hull.cstar.json"))
    run("construct", "multiplier", str(cat), "--out", str(d / "mult.cstar.json"))
    run("gen", "bimodule", "--category", str(cat), "--seed", "4", "--out", str(bim))
    run("gen", "module", "--category", str(cat), "--seed", "5", "--out", str(mod))
    run("tensor", str(mod), str(bim), "--oracle", "--out", str(d / "t.cstar.json"))
    run("construct", "conjugate", str(bim), "--out", str(d / "conj.cstar.json"))
    run("morita", str(bim))
    run("ew", str(bim), "--count", "3")
