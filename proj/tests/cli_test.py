"""End-to-end checks of the qpclab command line.

usage: cli_test.py <qpclab> <config.schema.json> <scratch dir>
"""

import json
import os
import shutil
import subprocess
import sys
import unittest
from pathlib import Path

import jsonschema

QPCLAB, SCHEMA_PATH, SCRATCH = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])


def qpclab(*args, env=None):
    return subprocess.run([QPCLAB, *args], capture_output=True, text=True, env=env, timeout=600)


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        shutil.rmtree(SCRATCH, ignore_errors=True)
        SCRATCH.mkdir(parents=True)
        cls.schema = json.loads(qpclab("list", "--schema").stdout)
        cls.catalog = json.loads(qpclab("list", "--json").stdout)

    def test_schema_file_is_current(self):
        self.assertEqual(json.loads(SCHEMA_PATH.read_text()), self.schema)
        jsonschema.Draft202012Validator.check_schema(self.schema)

    def test_plain_listing_names_every_experiment(self):
        out = qpclab("list")
        self.assertEqual(out.returncode, 0)
        for e in self.catalog:
            self.assertIn(e["name"], out.stdout)

    def test_resolved_configs_satisfy_schema(self):
        validator = jsonschema.Draft202012Validator(self.schema)
        for e in self.catalog:
            out = qpclab("validate", "--set", f"experiment={e['name']}")
            self.assertEqual(out.returncode, 0, out.stderr)
            resolved = json.loads(out.stdout)
            errors = [err.message for err in validator.iter_errors(resolved)]
            self.assertEqual(errors, [], e["name"])

    def test_schema_rejects_unknown_keys(self):
        validator = jsonschema.Draft202012Validator(self.schema)
        self.assertFalse(validator.is_valid({"experiment": "ids", "bogus": 1}))
        self.assertFalse(validator.is_valid({"experiment": "ids", "params": {"nope": 1}}))

    def test_config_errors_exit_2(self):
        self.assertEqual(qpclab("validate", "--set", "experiment=nope").returncode, 2)
        self.assertEqual(qpclab("run", "--set", "experiment=nope").returncode, 2)
        self.assertEqual(qpclab("validate", str(SCRATCH / "missing.json")).returncode, 2)
        bad = SCRATCH / "bad.json"
        bad.write_text("{ not json")
        self.assertEqual(qpclab("validate", str(bad)).returncode, 2)
        self.assertEqual(qpclab("frobnicate").returncode, 2)

    def test_run_from_file_with_overrides(self):
        cfg = SCRATCH / "ids.json"
        cfg.write_text(json.dumps({"experiment": "ids", "potential": {"type": "zero"},
                                   "params": {"N": 64, "x_grid": 4, "e_count": 100}}))
        out = qpclab("run", str(cfg), "--set", "params.N=128", "--output", str(SCRATCH / "out"), "--reproducible")
        self.assertEqual(out.returncode, 0, out.stderr)
        manifest_path = Path(out.stdout.strip())
        manifest = json.loads(manifest_path.read_text())
        self.assertEqual(manifest["config"]["params"]["N"], 128)
        self.assertEqual(manifest["exit_code"], 0)
        names = {f["path"] for f in manifest["files"]}
        self.assertIn("ids.csv", names)
        self.assertTrue((manifest_path.parent / "ids.csv").read_bytes().startswith(b"energy,ids,"))

    def test_output_dir_from_environment(self):
        env = dict(os.environ, QPC_OUTPUT_DIR=str(SCRATCH / "env"))
        out = qpclab("run", "--set", "experiment=ids", "--set", "potential.type=zero",
                     "--set", "params.N=32", "--set", "params.x_grid=2", env=env)
        self.assertEqual(out.returncode, 0, out.stderr)
        self.assertTrue((SCRATCH / "env" / "ids" / "manifest.json").exists())

    def test_numeric_regime_exit_3(self):
        out = qpclab("run", "--set", "experiment=ap-check", "--set", "potential.type=zero",
                     "--set", "params.chains=2", "--set", "params.N=1024", "--set", "params.ell=32",
                     "--set", "params.grid=16", "--output", str(SCRATCH / "regime"))
        self.assertEqual(out.returncode, 3)
        self.assertIn("qpclab:", out.stderr)

    def test_budget_exit_4(self):
        out = qpclab("run", "--set", "experiment=zeros-figure", "--set", "params.N=20",
                     "--set", "params.energies=[0.3]", "--set", "budget.max_boxes=10",
                     "--output", str(SCRATCH / "budget"))
        self.assertEqual(out.returncode, 4)
        manifest = json.loads((SCRATCH / "budget" / "zeros-figure" / "manifest.json").read_text())
        self.assertEqual(manifest["exit_code"], 4)


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])
