"""Size and power of the symmetry test on replicated samples.

Runs two small Monte Carlo studies: one under a process with equal
component ratios (the test should reject at roughly its nominal level)
and one with a 0.3 gap between them (the test should reject almost
always).  The replication counts are kept small so the demo finishes in
seconds; bump --replications for tighter rates.

Run:  python3 demos/simulation_study.py [--replications N]
"""

import argparse

from asymhedge import (
    DgpSpec,
    GarchSystemParams,
    ReportDocument,
    render_text,
    run_study,
)
from asymhedge.report import FIXED_CLOCK, build_study_report


def process(h_neg):
    return GarchSystemParams(
        alpha_pos=0.05, h_pos=0.5, alpha_neg=-0.05, h_neg=h_neg,
        gamma_pos=1e-4, phi_pos=[], lambda_pos=[],
        gamma_neg=1e-4, phi_neg=[], lambda_neg=[],
        gamma_cross=0.0, phi_cross=[], lambda_cross=[],
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replications", type=int, default=200)
    parser.add_argument("--t", type=int, default=1000, help="sample length")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    for label, h_neg in (("size (true ratios equal)", 0.5),
                         ("power (true gap 0.30)", 0.8)):
        spec = DgpSpec(true_params=process(h_neg), T=args.t, seed=args.seed)
        result = run_study(spec, args.replications)
        truth = {"h_pos": 0.5, "h_neg": h_neg, "T": args.t, "seed": args.seed}
        doc = build_study_report(result, {"study": label}, truth, clock=FIXED_CLOCK)
        print(render_text(doc))
        assert ReportDocument.from_json(doc.to_json()) == doc


if __name__ == "__main__":
    main()
