"""Write the CSV data behind figures 1-4 into a directory (default: results/)."""

import argparse
from pathlib import Path

from infobound import figures


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for n in sorted(figures.BUILDERS):
        table = figures.build(n, {})
        path = args.out_dir / f"fig{n}.csv"
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            figures.write_csv(fh, table.header, table.rows, table.meta)
        print(f"fig {n}: {len(table.rows)} rows -> {path}")


if __name__ == "__main__":
    main()
