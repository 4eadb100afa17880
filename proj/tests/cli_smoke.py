#!/usr/bin/env python3
"""Drives the wnforge binary through the fixture pipeline and the service."""
import json
import os
import pathlib
import signal
import subprocess
import sys
import tempfile
import urllib.request

BIN, SRC = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
FIX, GOLD = SRC / "tests/fixtures/e2e", SRC / "tests/golden/e2e"
SEED = "20240901"
failures = []


def run(store, *args, ok=True, env=None):
    cmd = [str(BIN), "--store", str(store), "--actor", "e2e", "--no-sync", *map(str, args)]
    p = subprocess.run(cmd, capture_output=True, text=True, env=env)
    if ok and p.returncode != 0:
        raise SystemExit(f"{' '.join(cmd)} failed ({p.returncode}): {p.stderr}")
    return p


def check(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + (f": {detail}" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def golden_block(text, header):
    lines, out, inside = text.splitlines(keepends=True), [], False
    for line in lines:
        if line.startswith("# "):
            inside = line.strip() == header
            continue
        if inside:
            out.append(line)
    return "".join(out)


def verdicts():
    table = {}
    for line in (FIX / "verdicts.tsv").read_text().splitlines():
        if line and not line.startswith("#"):
            m, w, p, s, v = line.split("\t")
            table[(m, w, p, s)] = v
    return table


with tempfile.TemporaryDirectory() as tmp:
    store = pathlib.Path(tmp) / "store"
    run(store, "init", "--pivot", "en", "--lang", "ca")
    run(store, "import", "synsets", FIX / "synsets.tsv")
    run(store, "import", "senses", FIX / "senses.tsv")
    links = run(store, "links", "generate", "--bilingual", FIX / "bilingual.tsv").stdout
    check("links generate matches golden", links == (GOLD / "links.txt").read_text())

    pure = pathlib.Path(tmp) / "pure.tsv"
    run(pathlib.Path(tmp) / "unused", "links", "generate", "--bilingual", FIX / "bilingual.tsv",
        "--senses", FIX / "senses.tsv", "--lang", "ca", "--out", pure)
    check("store-free generation matches golden", pure.read_text() == (GOLD / "links.txt").read_text())

    table = verdicts()
    methods = sorted({line.split("\t")[0] for line in links.splitlines()})
    for m in methods:
        for line in run(store, "validate", "sample", "--method", m, "--seed", SEED).stdout.splitlines():
            f = line.split("\t")
            link_id, method, word, pivot, synset = f[:5]
            flag = "--correct" if table[(method, word, pivot, synset)] == "correct" else "--incorrect"
            run(store, "validate", "verdict", "--link", link_id, flag)
    report = run(store, "report", "class-methods").stdout
    check("report matches golden", report == (GOLD / "report.txt").read_text())
    md = run(store, "report", "class-methods", "--format", "markdown").stdout
    check("markdown report header", md.startswith("| Criteria | #links |"))

    promoted = run(store, "promote", "--threshold", "85.0").stdout
    gold_promote = "".join(l for l in (GOLD / "promote.txt").read_text().splitlines(keepends=True)
                           if l.startswith(("promoted\t", "rejected\t")))
    check("promote matches golden", promoted == gold_promote)

    consult_gold = (GOLD / "consult.txt").read_text()
    for word in ("gat", "gos", "muntanya"):
        out = run(store, "consult", "--lang", "ca", "--start", word, "--relation", "hypernymy", "--depth", 5).stdout
        check(f"consult {word} matches golden", out == golden_block(consult_gold, f"# ca {word}"))

    base = run(store, "check", "base", "--pos", "noun", ok=False)
    check("check base finds no orphans", base.returncode == 0 and base.stdout == "")

    # Export, then rebuild the Catalan senses in a fresh store.
    exported = pathlib.Path(tmp) / "ca.txt"
    run(store, "export", "--lang", "ca", "--out", exported)
    fresh = pathlib.Path(tmp) / "fresh"
    run(fresh, "import", "export", exported, "--lang", "ca")
    out = run(fresh, "consult", "--lang", "ca", "--start", "gat", "--depth", 5).stdout
    check("exported store answers consult", "          entity.n.01 [noun]: ca:entitat(100.0)" in out and "ca:gat(100.0)" in out, out)

    # Optimistic edits and pivot protection.
    run(store, "edit", "gloss/ca/cat.n.01", "--action", "edit_gloss", "--value", "un felí domèstic",
        "--expected-version", 0)
    stale = run(store, "edit", "gloss/ca/cat.n.01", "--action", "edit_gloss", "--value", "x",
                "--expected-version", 0, ok=False)
    check("stale edit refused", stale.returncode == 1 and "VersionConflict" in stale.stderr, stale.stderr)
    pivot = run(store, "edit", "gloss/en/cat.n.01", "--action", "edit_gloss", "--value", "x", ok=False)
    check("pivot edit refused", pivot.returncode == 1 and "PivotImmutable" in pivot.stderr, pivot.stderr)
    hist = run(store, "history", "--action", "edit_gloss").stdout.splitlines()
    check("history lists the gloss edit", len(hist) == 1 and hist[0].split("\t")[2:] ==
          ["e2e", "edit_gloss", "gloss/ca/cat.n.01", "v1"], hist)

    env = dict(os.environ, WNFORGE_STORE=str(store))
    overridden = run(pathlib.Path(tmp) / "ignored", "history", "--action", "edit_gloss", env=env)
    check("WNFORGE_STORE overrides --store", overridden.stdout.splitlines() == hist)

    res = run(store, "resource", "--resources", FIX / "resources.tsv", "dicc", "Gat").stdout
    check("resource lookup", res == "gat\tcat\ngat\t(zool.) small domesticated feline\n", repr(res))

    # Service: bind, answer, static console, shut down on SIGTERM with a checkpoint.
    (store / "kb.tsv").unlink(missing_ok=True)
    proc = subprocess.Popen([str(BIN), "--store", str(store), "serve", "--port", "0", "--static", SRC / "web",
                             "--resources", FIX / "resources.tsv"], stdout=subprocess.PIPE, text=True)
    try:
        first = proc.stdout.readline().strip()
        url = first.split(" ")[-1]
        with urllib.request.urlopen(url + "/api/languages", timeout=5) as r:
            langs = json.load(r)["languages"]
        check("serve answers /api/languages", {"code": "en", "pivot": True} in langs, langs)
        with urllib.request.urlopen(url + "/", timeout=5) as r:
            page = r.read().decode()
        check("serve delivers the console at /", page == (SRC / "web/index.html").read_text())
        with urllib.request.urlopen(url + "/api/resources/dicc/gos", timeout=5) as r:
            check("serve resource lookup", json.load(r)["entries"] == ["gos\tdog"])
    finally:
        proc.send_signal(signal.SIGTERM)
        code = proc.wait(timeout=10)
    check("serve exits cleanly on SIGTERM", code == 0, code)
    check("shutdown writes the checkpoint", (store / "kb.tsv").exists())

    taken = subprocess.Popen([str(BIN), "--store", str(store), "serve", "--port", "0"], stdout=subprocess.PIPE,
                             text=True)
    port = taken.stdout.readline().strip().rsplit(":", 1)[-1]
    clash = run(store, "serve", "--port", port, ok=False)
    taken.send_signal(signal.SIGINT)
    taken.wait(timeout=10)
    check("second server on a taken port fails with BindError", clash.returncode == 1 and "BindError" in clash.stderr,
          clash.stderr)

print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
