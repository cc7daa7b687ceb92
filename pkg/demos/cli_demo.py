"""Driving the command line tool from Python (same as running `lyapspec ...` in a shell)."""
import json
import os
import tempfile

from lyapspec.cli import run


def main():
    print("$ lyapspec classify --map gauss")
    run(["classify", "--map", "gauss"])

    print("\n$ lyapspec newton --map luroth-dyadic --alpha 1.3862944")
    run(["newton", "--map", "luroth-dyadic", "--alpha", "1.3862944"])

    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "run.json")
        with open(cfg, "w") as fh:
            json.dump({"command": "pressure", "map": "renyi", "t_min": 0.6, "t_max": 2.0, "steps": 5}, fh)
        print("\n$ lyapspec --config run.json", flush=True)
        run(["--config", cfg])

        svg = os.path.join(tmp, "gauss.svg")
        code = run(["spectrum", "--map", "gauss", "--format", "svg", "-o", svg])
        print(f"\nspectrum svg: exit {code}, {os.path.getsize(svg)} bytes")

    print("\n$ lyapspec pressure --map gauss --t-min 2 --t-max 1   (bad range)", flush=True)
    print("exit code", run(["pressure", "--map", "gauss", "--t-min", "2", "--t-max", "1"]))


if __name__ == "__main__":
    main()
