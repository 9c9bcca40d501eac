#!/usr/bin/env python3
"""Smoke test for the `pgn` extension module.

Builds the cdylib with cargo, loads it straight from the target directory
(no packaging step — the crate mirror carries no Python build backend), and
walks the whole binding surface with exact expected values.
"""

import argparse
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_module(release: bool) -> Path:
    """Compile the extension and stage it under an importable name."""
    profile = "release" if release else "debug"
    cmd = ["cargo", "build", "-p", "pgn-python"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=ROOT, check=True)
    lib = ROOT / "target" / profile / "libpgn.so"
    stage = Path(tempfile.mkdtemp(prefix="pgn-smoke-"))
    shutil.copy2(lib, stage / "pgn.so")
    return stage


def frac(text: str) -> Fraction:
    return Fraction(text)


CHECKS = []


def check(name, ok, detail=""):
    CHECKS.append(ok)
    mark = "ok" if ok else "FAIL"
    suffix = f"  ({detail})" if detail and not ok else ""
    print(f"[{mark}] {name}{suffix}")


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--release", action="store_true", help="build with optimizations")
    args = parser.parse_args()

    sys.path.insert(0, str(build_module(args.release)))
    import pgn

    # the flagship 5-component seed: alpha = 43/9, beta = 86/9
    seed = pgn.Seed(
        m=2,
        rho="8",
        points=[
            ["1", "8", "8", "10", "25"],
            ["8", "10", "10", "25", "51"],
            ["8", "28", "28", "64", "80"],
        ],
    )
    check("seed dimensions", (seed.m, seed.n, seed.s, seed.rho) == (2, 5, 3, "8"))
    check("chi pair", seed.alpha_beta() == ("43/9", "86/9"), str(seed.alpha_beta()))
    check("windowed pair at m=1", seed.alpha_beta_at(1) == ("47/4", "94"))

    sys_ = seed.unfold(2)
    check("unfold domain", (sys_.q0, sys_.q1) == ("52", "3328"))
    check("unfold is nondegenerate", sys_.is_nondegenerate())
    anchors = sys_.division_numbers(2)
    check("anchors start at q0", anchors[0] == "52", anchors[:3])
    values = sys_.evaluate(anchors[1])
    check(
        "values are sorted and sum to q",
        sum(map(frac, values)) == frac(anchors[1])
        and all(frac(a) <= frac(b) for a, b in zip(values, values[1:])),
    )

    opp = sys_.opposite()
    check("opposite involution", opp.opposite().to_json() == sys_.to_json())
    check("seed JSON round trip", pgn.Seed.from_json(seed.to_json()).alpha_beta() == ("43/9", "86/9"))
    check("system JSON round trip", pgn.System.from_json(sys_.to_json()).q1 == "3328")

    report = pgn.audit_seed(seed)
    violations = [r for r in report if r["status"] == "violation"]
    rules = {r["rule"] for r in report}
    check("seed audit is clean", not violations, violations[:1])
    check(
        "audit covers the named rules",
        {"type_kl", "chi_extrema_max", "mm_lemma_eq2", "dim5_cap", "s35_bloc_lemma4"} <= rules,
        sorted(rules),
    )
    check("system audit is clean",
          all(r["status"] != "violation" for r in pgn.audit_system(sys_)))

    # families
    reg, (a, b) = pgn.regular_family(4, 2, "2")
    check("regular family pair", (a, b) == ("2", "4") and reg is not None)
    degenerate, (a, b) = pgn.regular_family(3, 1, "1", "1")
    check("degenerate regular has no seed", degenerate is None and (a, b) == ("2", "2"))
    s35, (a, b) = pgn.s35_family("2", 6)
    check("s35 family pair", (a, b) == ("323/65", "646/65"))
    arc_seed, point, target = pgn.s35_arc2("9/5", "1/100")
    check("arc sample targets the arc point", target == ("203/50", "1827/250"), target)
    check(
        "arc sample is close to its target",
        abs(frac(point[0]) - frac(target[0])) < Fraction(1, 10),
        point,
    )

    # membership
    check("s24 membership", pgn.membership("s24", "2", "4") == "in")
    check("s24 strictness", pgn.membership("s24", "2", "399/100") == "out")
    check("s35_high scope", pgn.membership("s35_high", "43/9", "86/9") == "outside-scope")
    check("s35_high accepts the boundary", pgn.membership("s35_high", "5", "10") == "in")
    check("conjecture misses the upper arc", pgn.membership("conjecture:3:5", "5", "10") == "out")
    check("s1n handles infinity", pgn.membership("s1n:3", "1/2", "inf") == "in")
    check("omega spectrum", pgn.omega_contains(3, ["1/2", "2"]))

    # deformations on the flagship seed
    wide = pgn.rectangle_extend(seed)
    check("rectangle extension keeps the pair", wide.alpha_beta() == ("43/9", "86/9"))
    raised, (a, b) = pgn.scale_above(wide, "25", "4")
    check(
        "scale_above raises beta, keeps alpha",
        a == "43/9" and frac(b) > frac("86/9"),
        (a, b),
    )
    lowered, (a, b) = pgn.flatten(wide, "64", "1600", "1/2")
    check(
        "flatten lowers alpha, keeps beta",
        frac(a) < frac("43/9") and b == "86/9",
        (a, b),
    )

    # boundary search: the regular corner of S_{2,4} at g = 2
    result = pgn.max_alpha(2, 4, "1:4", rho="2", g="2", lo="3/2", hi="3", iters=20)
    check(
        "max_alpha brackets the corner",
        frac(result["alpha_lo"]) <= 2 < frac(result["alpha_hi"]) <= 2 + Fraction(1, 2**18),
        (result["alpha_lo"], result["alpha_hi"]),
    )
    check("max_alpha returns a witness seed", result["seed"] is not None
          and frac(result["alpha"]) >= frac(result["alpha_lo"]))

    # validation errors surface as ValueError
    try:
        pgn.Seed(m=2, rho="1", points=[["1", "2", "2"]])
        check("bad rho rejected", False)
    except ValueError:
        check("bad rho rejected", True)

    failed = CHECKS.count(False)
    print(f"{len(CHECKS) - failed}/{len(CHECKS)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
