#!/usr/bin/env python3
"""Download and verify the two benchmark datasets into data/.

Run this on a host with internet access; the test suite's real-data cases
(acceptance criteria for the benchmark tables) skip until these files exist:

    data/agaricus-lepiota.data          8124 records, 23 comma-separated
                                        fields, class (e/p) first
    data/breast-cancer-wisconsin.data   699 records, 11 comma-separated
                                        fields (sample id first, class 2/4
                                        last); 16 rows carry '?' and are
                                        dropped by the loaders, leaving 683

Usage: python scripts/fetch_datasets.py [target_dir]
"""

import sys
import urllib.request
from collections import Counter
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"
FILES = {
    "agaricus-lepiota.data": f"{BASE}/mushroom/agaricus-lepiota.data",
    "breast-cancer-wisconsin.data": f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
}


def fetch(url: str, target: Path) -> None:
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        target.write_bytes(response.read())


def verify_mushroom(path: Path) -> None:
    lines = [l for l in path.read_text().splitlines() if l.strip()]
    assert len(lines) == 8124, f"expected 8124 records, got {len(lines)}"
    fields = [l.split(",") for l in lines]
    assert all(len(f) == 23 for f in fields), "expected 23 fields per record"
    classes = Counter(f[0] for f in fields)
    assert classes == {"e": 4208, "p": 3916}, f"unexpected class counts {classes}"
    print(f"  ok: {path} (8124 records, classes {dict(classes)})")


def verify_cancer(path: Path) -> None:
    lines = [l for l in path.read_text().splitlines() if l.strip()]
    assert len(lines) == 699, f"expected 699 records, got {len(lines)}"
    fields = [l.split(",") for l in lines]
    assert all(len(f) == 11 for f in fields), "expected 11 fields per record"
    clean = [f for f in fields if "?" not in f]
    assert len(clean) == 683, f"expected 683 complete records, got {len(clean)}"
    classes = Counter(f[-1] for f in clean)
    assert classes == {"2": 444, "4": 239}, f"unexpected class counts {classes}"
    print(f"  ok: {path} (699 records, 683 complete, classes {dict(classes)})")


def main() -> int:
    target_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    target_dir.mkdir(parents=True, exist_ok=True)
    for name, url in FILES.items():
        target = target_dir / name
        if not target.exists():
            fetch(url, target)
        else:
            print(f"already present: {target}")
    verify_mushroom(target_dir / "agaricus-lepiota.data")
    verify_cancer(target_dir / "breast-cancer-wisconsin.data")
    print("all datasets verified")
    return 0


if __name__ == "__main__":
    sys.exit(main())
