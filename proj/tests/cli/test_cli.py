#!/usr/bin/env python3
"""End-to-end tests for the sumcore command line tool."""

import argparse
import csv
import io
import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

ARGS = None


def run(*argv, expect=0):
    proc = subprocess.run([ARGS.binary, *argv], capture_output=True, text=True, timeout=120)
    if proc.returncode != expect:
        raise AssertionError(
            f"{' '.join(argv)}: exit {proc.returncode}, wanted {expect}\nstderr: {proc.stderr}"
        )
    return proc


def data(name):
    return os.path.join(ARGS.data, name)


def schema(name):
    with open(os.path.join(ARGS.schemas, name + ".json")) as f:
        return json.load(f)


def json_of(proc, schema_name):
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, schema(schema_name))
    return doc


class Decompose(unittest.TestCase):
    def test_minmax_lattice(self):
        doc = json_of(run("decompose", "--graph", data("g1.txt"), "--summarizer", "minmax"), "lattice")
        cores = {tuple(c["scv"]): c["members"] for c in doc["cores"]}
        self.assertEqual(cores, {(1.0, 1.0): [1, 2, 3, 4], (0.0, 2.0): [1, 2, 3]})
        self.assertTrue(doc["complete"])
        self.assertEqual(sorted(map(tuple, doc["skyline"])), [(0.0, 2.0), (1.0, 1.0)])

    def test_top_lambda_out_of_range(self):
        proc = run("decompose", "--graph", data("g1.txt"), "--summarizer", "top:9", expect=1)
        self.assertIn("λ out of range", proc.stderr)
        self.assertEqual(proc.stdout, "")

    def test_unknown_summarizer(self):
        run("decompose", "--graph", data("g1.txt"), "--summarizer", "median", expect=1)

    def test_budget_truncation_exit_two(self):
        proc = run("decompose", "--random", "12:3:0.5", "--seed", "4", "--summarizer", "identity",
                   "--max-states", "2", expect=2)
        doc = json_of(proc, "lattice")
        self.assertFalse(doc["complete"])
        self.assertIsNone(doc["skyline"])

    def test_csv_columns(self):
        proc = run("decompose", "--graph", data("g1.txt"), "--summarizer", "minmax", "--format", "csv")
        rows = list(csv.reader(io.StringIO(proc.stdout)))
        self.assertEqual(rows[0][:3], ["node", "scv_0", "scv_1"])
        self.assertGreater(len(rows), 1)

    def test_stat_partition_spec(self):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            json.dump({"groups": [[0, 1]], "families": ["poisson_binomial"]}, f)
        try:
            stat = json_of(run("decompose", "--graph", data("g1.txt"), "--summarizer", "stat:@" + f.name), "lattice")
            plain = json_of(run("decompose", "--graph", data("g1.txt"), "--summarizer", "sum"), "lattice")
            self.assertEqual([c["members"] for c in stat["cores"]], [c["members"] for c in plain["cores"]])
        finally:
            os.unlink(f.name)

    def test_missing_graph_file(self):
        run("decompose", "--graph", data("no_such_file.txt"), "--summarizer", "sum", expect=1)

    def test_out_file_and_logs_on_stderr(self):
        with tempfile.TemporaryDirectory() as d:
            out = os.path.join(d, "lattice.json")
            proc = run("decompose", "--graph", data("g1.txt"), "--summarizer", "sum", "--out", out)
            self.assertEqual(proc.stdout, "")
            with open(out) as f:
                jsonschema.validate(json.load(f), schema("lattice"))


class WFirmCore(unittest.TestCase):
    def test_toy_indices(self):
        proc = run("wfirmcore", "--graph", data("g1.txt"), "--lambda-set", "1,2", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(proc.stdout)))
        got = {(r["node"], r["lambda"]): int(r["wcore"]) for r in rows}
        self.assertEqual([got[(n, "1")] for n in "1234"], [2, 2, 2, 1])
        self.assertEqual([got[(n, "2")] for n in "1234"], [1, 1, 1, 1])
        json_of(run("wfirmcore", "--graph", data("g1.txt"), "--lambda-set", "1,2"), "wcore")

    def test_conflicting_or_missing_lambda_flags(self):
        run("wfirmcore", "--graph", data("g1.txt"), "--lambda-set", "1", "--span-core", "1", expect=1)
        run("wfirmcore", "--graph", data("g1.txt"), expect=1)
        run("wfirmcore", "--graph", data("g1.txt"), "--lambda-set", "-1,2", expect=1)
        run("wfirmcore", "--graph", data("g1.txt"), "--lambda-set", "1,x", expect=1)

    def test_lambda_set_is_normalised(self):
        doc = json_of(run("wfirmcore", "--graph", data("g1.txt"), "--lambda-set", "2,1,2"), "wcore")
        self.assertEqual(doc["lambdas"], [1.0, 2.0])

    def test_weights_file(self):
        doc = json_of(run("wfirmcore", "--graph", data("g1.txt"), "--weights", data("g1_weights.txt"),
                          "--lambda-set", "11"), "wcore")
        self.assertEqual(doc["cores"][0]["members"], [1, 2, 3, 4])


class Densest(unittest.TestCase):
    def test_toy_report(self):
        doc = json_of(run("densest", "--graph", data("g1.txt"), "--alpha", "2", "--beta", "1"), "density")
        self.assertEqual(doc["subset"], [1, 2, 3, 4])
        self.assertEqual(doc["size"], 4)
        self.assertAlmostEqual(doc["rho_new"], 2.25)
        self.assertAlmostEqual(doc["rho_ml"], 1.0)
        self.assertAlmostEqual(doc["rho_edge"], 0.5)
        terms = {t["node"]: (t["value"], t["best_lambda"]) for t in doc["per_node_terms"]}
        self.assertEqual(terms[3], (3.0, 1.0))
        self.assertEqual(terms[4], (2.0, 2.0))
        self.assertAlmostEqual(doc["guarantee"]["factor"], 0.25)

    def test_objectives_and_variants(self):
        for extra in (["--density", "ml"], ["--density", "edge"], ["--min-product"], ["--global-phi"],
                      ["--no-guarantee"]):
            json_of(run("densest", "--graph", data("g1.txt"), *extra), "density")

    def test_bad_alpha_and_beta(self):
        run("densest", "--graph", data("g1.txt"), "--alpha", "3", expect=1)
        run("densest", "--graph", data("g1.txt"), "--beta", "0", expect=1)

    def test_terms_csv(self):
        proc = run("densest", "--graph", data("g1.txt"), "--format", "csv")
        self.assertEqual(proc.stdout.splitlines()[0], "node,best_lambda,value")


class Engagement(unittest.TestCase):
    def test_equilibrium_and_tau(self):
        doc = json_of(run("engagement", "--graph", data("g1.txt"), "--k", "1,1", "--tau",
                          "--departures", data("g1_departures.csv")), "engagement")
        self.assertTrue(doc["equilibrium"])
        self.assertEqual(doc["engaged"], [1, 2, 3, 4])
        tau = {n["node"]: n["tau"] for n in doc["nodes"]}
        self.assertEqual(tau, {1: 2.0, 2: 2.0, 3: 2.0, 4: 1.0})
        rates = [b["departure_rate"] for b in doc["departure_curve"]]
        self.assertEqual(rates, sorted(rates, reverse=True))

    def test_empty_core(self):
        doc = json_of(run("engagement", "--graph", data("g1.txt"), "--k", "2,1"), "engagement")
        self.assertEqual(doc["engaged"], [])

    def test_csv_and_curve_file(self):
        with tempfile.TemporaryDirectory() as d:
            curve = os.path.join(d, "curve.csv")
            proc = run("engagement", "--graph", data("g1.txt"), "--k", "1,1", "--tau", "--format", "csv",
                       "--departures", data("g1_departures.csv"), "--curve-out", curve)
            self.assertEqual(proc.stdout.splitlines()[0], "node,tau,engaged_layers")
            with open(curve) as f:
                self.assertEqual(f.readline().strip(), "tau_bucket,departure_rate")

    def test_k_dimension_mismatch(self):
        run("engagement", "--graph", data("g1.txt"), "--k", "1", expect=1)


class Oracle(unittest.TestCase):
    def test_kinds(self):
        core = json_of(run("oracle", "--graph", data("g1.txt"), "--kind", "core", "--summarizer", "minmax",
                           "--k", "0,2"), "oracle")
        self.assertEqual(core["members"], [1, 2, 3])
        wcore = json_of(run("oracle", "--graph", data("g1.txt"), "--kind", "wcore", "--k", "2", "--lambda", "1"),
                        "oracle")
        self.assertEqual(wcore["members"], [1, 2, 3])
        best = json_of(run("oracle", "--graph", data("g1.txt"), "--kind", "densest"), "oracle")
        self.assertAlmostEqual(best["density"], 2.25)

    def test_budget_exit_two(self):
        run("oracle", "--random", "20:1:0.2", "--kind", "densest", expect=2)


class Stats(unittest.TestCase):
    def test_json_and_csv(self):
        doc = json_of(run("stats", "--graph", data("g1.txt")), "stats")
        self.assertEqual([l["edges"] for l in doc["layers"]], [4, 2])
        proc = run("stats", "--graph", data("g1.txt"), "--format", "csv")
        self.assertEqual(proc.stdout.splitlines()[0], "layer,edges,mean_degree,variance,tail_exponent")


class Determinism(unittest.TestCase):
    COMMANDS = [
        ["decompose", "--random", "30:3:0.2", "--summarizer", "identity"],
        ["decompose", "--random", "30:3:0.2", "--summarizer", "minmax", "--format", "csv"],
        ["wfirmcore", "--random", "40:3:0.2", "--lambda-set", "1,2,3"],
        ["densest", "--random", "30:3:0.2"],
        ["engagement", "--random", "30:2:0.2", "--k", "1,1", "--tau"],
        ["stats", "--random", "50:3:0.1"],
    ]

    def test_byte_identical_runs_and_thread_counts(self):
        for cmd in self.COMMANDS:
            a = run(*cmd, "--seed", "7").stdout
            b = run(*cmd, "--seed", "7").stdout
            c = run(*cmd, "--seed", "7", "--threads", "4").stdout
            self.assertEqual(a, b, cmd)
            self.assertEqual(a, c, cmd)
            self.assertTrue(a)


def main():
    global ARGS
    parser = argparse.ArgumentParser()
    parser.add_argument("--binary", required=True)
    parser.add_argument("--data", required=True)
    parser.add_argument("--schemas", required=True)
    ARGS, rest = parser.parse_known_args()
    unittest.main(argv=[sys.argv[0], *rest], verbosity=2)


if __name__ == "__main__":
    main()
