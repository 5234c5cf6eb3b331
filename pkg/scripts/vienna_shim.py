#!/usr/bin/env python3
"""Expose ViennaRNA as an external folding engine over the line protocol.

Reads one request per line on stdin:

    FOLD <sequence> <target-dot-bracket>

and answers with exactly one line:

    OK <mfe_structure> <mfe_energy> <ensemble_free_energy> <target_probability> <ensemble_defect>
    ERR <message>

Energies are kcal/mol at the chosen temperature. The ensemble defect is
reported as an expected nucleotide count, not a per-nucleotide fraction.

Requires the ViennaRNA python bindings (pip install ViennaRNA). By
default the Turner 1999 parameter set is loaded when the installed
bindings ship it; pass --params 2004 to keep the modern set instead.
"""

from __future__ import annotations

import argparse
import sys


def load_vienna(params: str, temperature: float):
    try:
        import RNA
    except ImportError:
        print(
            "vienna_shim: the ViennaRNA python bindings are not installed",
            file=sys.stderr,
        )
        sys.exit(1)
    if params == "1999":
        loader = getattr(RNA, "params_load_RNA_Turner1999", None)
        if loader is None:
            print("vienna_shim: this ViennaRNA build lacks the 1999 tables", file=sys.stderr)
            sys.exit(1)
        loader()
    md = RNA.md()
    md.temperature = temperature
    return RNA, md


def answer(RNA, md, sequence: str, target: str) -> str:
    if len(sequence) != len(target):
        return "ERR sequence and target lengths differ"
    fc = RNA.fold_compound(sequence, md)
    mfe_structure, mfe_energy = fc.mfe()
    fc.exp_params_rescale(mfe_energy)
    _, ensemble_energy = fc.pf()
    probability = fc.pr_structure(target)
    defect = fc.ensemble_defect(target) * len(sequence)
    return (
        f"OK {mfe_structure} {mfe_energy:.6f} {ensemble_energy:.6f} "
        f"{probability:.12g} {defect:.12g}"
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--params", choices=("1999", "2004"), default="1999")
    parser.add_argument("--temperature", type=float, default=37.0)
    args = parser.parse_args()

    RNA, md = load_vienna(args.params, args.temperature)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3 or fields[0] != "FOLD":
            print("ERR expected: FOLD <sequence> <target>", flush=True)
            continue
        try:
            reply = answer(RNA, md, fields[1], fields[2])
        except Exception as exc:
            reply = f"ERR {exc}"
        print(reply, flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
