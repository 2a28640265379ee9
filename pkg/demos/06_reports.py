"""
Preset runs and reports
=======================

The same pipeline the command line drives: build or load a cached
spectrum, compute the profile and audits, and write CSV and JSON.
Equivalent shell command::

    slopegrowth preset example41 --lmax 10 --out runs/example41
"""
import tempfile
from pathlib import Path

from slopegrowth.report import emit_report, load_report, run_preset

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "example41"
    report = run_preset("example41", lmax=10, out=str(out))
    print("horizon", report.meta["horizon"], "window", report.meta["window"])
    print("theta*", report.theta_star, "rate", report.delta_star)
    print(report.condition["text"].splitlines()[0])
    for a in report.audits:
        print(f"  {a['name']}: {'pass' if a['passed'] else 'FAIL'}")
    print("exit code", report.exit_code)

    emit_report(report, "csv")
    emit_report(report, "json")
    print(sorted(p.name for p in out.iterdir()))
    print((out / "profile.csv").read_text().splitlines()[0])

    # a second run reuses the cached spectrum and reproduces the CSV exactly
    again = run_preset("example41", lmax=10, out=str(out))
    print("identical profile:", again.profile_csv() == report.profile_csv())
    print("json reload equal:", load_report(out / "report.json").profile == report.profile)
