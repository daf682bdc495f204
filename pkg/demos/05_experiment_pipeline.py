"""End-to-end pipeline: one JSON config drives sweeps, reports and charts.

The same configuration object feeds every experiment family.  This script
builds one programmatically, runs the gap experiment and the validation
suite, and prints where the artifacts landed.  The equivalent shell session:

    bathybands gaps     --config config.json --out out/
    bathybands validate --config config.json --out out/
"""

import json
from pathlib import Path

from bathybands import experiments

config_text = json.dumps(
    {
        "bathymetry": {"kind": "cosine_series", "terms": [[2, 2.0, 0.0]]},
        "epsilon_list": [0.04, 0.02],
        "theta_grid": {"kind": "uniform", "count": 17},
        "grid": {"n_x": 32, "n_z": 16, "oversample": 4},
        "n_bands": 6,
        "gap_pairs": [1],
    }
)
config = experiments.parse_config(config_text)
out = Path("pipeline_out")

for path in experiments.run_bands(config, out):
    print(f"wrote {path}")

report_path = experiments.run_gaps(config, out)
print(f"wrote {report_path}")
report = json.loads(report_path.read_text())
for entry in report["entries"]:
    measured = entry["measured"]["width"]
    predicted = 2 * entry["predicted"]["half_width"]
    print(
        f"  eps = {entry['epsilon']}: width {measured:.6f} vs predicted "
        f"{predicted:.6f} (deviation {entry['deviation']:.2%}, "
        f"passed: {entry['passed']})"
    )

validation_path = experiments.run_validate(config, out)
print(f"wrote {validation_path}")
validation = json.loads(validation_path.read_text())
for check in validation["checks"]:
    print(f"  [{'pass' if check['passed'] else 'FAIL'}] {check['name']}")
