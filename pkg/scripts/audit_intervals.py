import argparse
import sys

import pandas as pd

sys.path.append("src")
from cubecocycle.families import load_family
from cubecocycle.hulls import BALL_CENTRES, bound_audit_frame


def main(args: argparse.Namespace):
    frames = []
    for family in args.families:
        spec, complex_ = load_family(family, max_vertices=args.max_vertices)
        for centre in args.centres:
            frame = bound_audit_frame(complex_, str(spec), centre=centre)
            frame.insert(1, "centre", centre)
            frames.append(frame)
            failed = int((~frame["pass"]).sum())
            print(
                f"{spec} centre={centre}: {len(frame)} rows, {failed} over "
                "the bound",
                file=sys.stderr,
            )

    audit = pd.concat(frames, ignore_index=True)
    audit.to_csv(args.out, index=False)
    if not audit["pass"].all():
        sys.exit(1)


if __name__ == "__main__":
    argparser = argparse.ArgumentParser(
        description="Count interval/ball intersections against (k+1)^d."
    )
    argparser.add_argument(
        "families", nargs="+", help="Family strings or JSON complexes."
    )
    argparser.add_argument(
        "-o", "--out", default="interval_audit.csv", help="CSV output path."
    )
    argparser.add_argument(
        "--centres",
        nargs="+",
        choices=BALL_CENTRES,
        default=list(BALL_CENTRES),
        help="Ball centres to audit.",
    )
    argparser.add_argument(
        "--max_vertices",
        type=int,
        default=2000,
        help="Largest complex to generate.",
    )
    args = argparser.parse_args()
    main(args)
