"""Runs the CLI on small problems and checks exit codes and certificate JSON against the schema."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
schema = json.loads(pathlib.Path(schema_path).read_text())
validator = jsonschema.Draft202012Validator(schema)

cases = [
    # (name, config body, expected exit code, expected verdict)
    ("emden3", "[problem]\nlambda = 0\na3 = 1\n[solver]\nN = 20\n", 0, "positive"),
    ("coarse", "[problem]\na3 = 1\n[solver]\nN = 16\n", 3, "failed"),
    ("allen_cahn", "[problem]\nepsilon = 0.1\n[solver]\nN = 20\n", 0, "positive"),
    ("no_positive", "[problem]\nlambda = 60\na3 = 1\n[solver]\nN = 20\n", 4, "no-positive-solution"),
    ("shallow", "[problem]\nepsilon = 0.1\n[solver]\nN = 20\n[rigor]\ndepth = 1\nmax_depth = 1\n", 3,
     "existence-only"),
    ("mixed_no_rinf", "[problem]\nlambda = 25\na3 = 1\na5 = -1\n[solver]\nN = 12\n", None, None),
]

failures = 0
with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    for name, body, code, verdict in cases:
        cfg = tmp / f"{name}.toml"
        cert = tmp / f"{name}.json"
        cfg.write_text(body)
        r = subprocess.run([cli, "certify", "--config", str(cfg), "--out", str(cert)],
                           capture_output=True, text=True)
        doc = json.loads(cert.read_text())
        errors = sorted(validator.iter_errors(doc), key=str)
        ok = not errors
        if code is not None:
            ok = ok and r.returncode == code and doc["verdict"] == verdict
        else:
            ok = ok and r.returncode in (3, 4)
        print(f"{'ok  ' if ok else 'FAIL'} {name}: exit {r.returncode}, verdict {doc['verdict']}")
        for e in errors:
            print("     schema:", e.message)
        failures += not ok

    # Parse error path.
    bad = tmp / "bad.toml"
    bad.write_text("[problem]\na3 = 1\n[solver]\nN = 0\n")
    r = subprocess.run([cli, "certify", "--config", str(bad)], capture_output=True, text=True)
    print(f"{'ok  ' if r.returncode == 2 else 'FAIL'} parse error: exit {r.returncode}")
    failures += r.returncode != 2

    # solve -> certify from the stored approximation reproduces the certificate.
    cfg = tmp / "emden3.toml"
    approx = tmp / "e.approx"
    solved = subprocess.run([cli, "solve", "--config", str(cfg), "--out", str(approx)], check=True,
                            capture_output=True, text=True)
    reported = float(solved.stdout.split("max u_hat ~ ")[1].split()[0])
    a = tmp / "a.json"
    subprocess.run([cli, "certify", "--config", str(cfg), "--approx", str(approx), "--out", str(a)],
                   capture_output=True)
    same = json.loads(a.read_text()) == json.loads((tmp / "emden3.json").read_text())
    print(f"{'ok  ' if same else 'FAIL'} stored approximation reproduces the certificate")
    failures += not same

    # plot-data samples agree with the maximum reported by solve.
    samples = tmp / "e.csv"
    subprocess.run([cli, "plot-data", "--approx", str(approx), "--resolution", "401", "--out", str(samples)],
                   check=True)
    sampled = max(float(r.split(",")[2]) for r in samples.read_text().splitlines()[1:])
    close = abs(sampled - reported) <= 1e-3
    print(f"{'ok  ' if close else 'FAIL'} plot-data max {sampled:.6f} vs solve {reported}")
    failures += not close

    # plot-data: zero function samples and 4^k flag rows.
    zero = tmp / "zero.approx"
    zero.write_bytes(b"ellipcert-approximation 1\nN 3\ndomain 0x0p+0 0x1p+0 0x0p+0 0x1p+0\n"
                     b"problem zero\ndata\n" + b"\0" * 72)
    csv, flags = tmp / "z.csv", tmp / "f.csv"
    subprocess.run([cli, "plot-data", "--approx", str(zero), "--resolution", "9", "--out", str(csv),
                    "--depth", "3", "--flags", str(flags)], check=True)
    rows = csv.read_text().splitlines()[1:]
    zero_ok = len(rows) == 81 and all(float(r.split(",")[2]) == 0.0 for r in rows)
    flag_ok = len(flags.read_text().splitlines()) - 1 == 4 ** 3
    print(f"{'ok  ' if zero_ok and flag_ok else 'FAIL'} plot-data zero function and flag rows")
    failures += not (zero_ok and flag_ok)

sys.exit(1 if failures else 0)
