#!/usr/bin/env python3
# Copyright 2026 The natsyn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the offline corpus: candidate modules, their hand-built circuits,
the translation-cache manifest and the keyed scripted-backend responses.

Usage: make_corpus.py [path/to/natsyn]

Response keys are computed by `natsyn fixture-key`, so the scripted
directories follow the prompt construction of the build they were made with.
"""

import json
import pathlib
import shutil
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent / "aiger"))

from make_aiger import Builder  # noqa: E402

# ---- modules -----------------------------------------------------------------

HEADER_1 = "module solution (\n    input clk,\n    input a,\n    output b );\n"


def detector_v(n, complete="&next", started=False, param=False):
    width = "n-1" if param else str(n - 1)
    zero = "{n{1'b0}}" if param else f"{n}'b0"
    head = "module solution #(\n    parameter n = 27\n) (\n" if param else "module solution (\n"
    lines = [
        head + f"    input clk,\n    input [{width}:0] finished,\n    output allFinished );\n",
        f"    reg [{width}:0] seen = {zero};\n",
        f"    wire [{width}:0] next;\n",
        "    wire complete;\n",
    ]
    if started:
        lines.append("    reg started = 1'b0;\n")
    lines.append("    assign next = seen | finished;\n")
    lines.append(f"    assign complete = {complete}{' | !started' if started else ''};\n")
    lines.append("    assign allFinished = complete;\n")
    lines.append("    always @(posedge clk) begin\n")
    if started:
        lines.append("        started <= 1'b1;\n")
    lines.append(f"        if (complete) begin\n            seen <= {zero};\n        end else begin\n"
                 "            seen <= next;\n        end\n    end\nendmodule\n")
    return "".join(lines)


MODULES = {
    "buffer_inverted.v": HEADER_1 + "    assign b = !a;\nendmodule\n",
    "buffer.v": HEADER_1 + "    assign b = a;\nendmodule\n",
    "delay_inverted.v": HEADER_1 + "    reg prev = 1'b0;\n    always @(posedge clk) prev <= a;\n"
                                   "    assign b = !prev;\nendmodule\n",
    "delay.v": HEADER_1 + "    reg prev = 1'b0;\n    always @(posedge clk) prev <= a;\n"
                          "    assign b = prev;\nendmodule\n",
    "sticky.v": HEADER_1 + "    reg seen = 1'b0;\n    always @(posedge clk) seen <= seen | a;\n"
                           "    assign b = seen;\nendmodule\n",
    "clairvoyant_env.v": "module environment (\n    input clk,\n    input b,\n    output a );\n"
                         "    reg prev = 1'b0;\n    always @(posedge clk) prev <= !b;\n"
                         "    assign a = prev;\nendmodule\n",
    "arbiter_both.v": "module solution (\n    input clk,\n    input [1:0] r,\n    output [1:0] g );\n"
                      "    assign g = r;\nendmodule\n",
    "arbiter_priority.v": "module solution (\n    input clk,\n    input [1:0] r,\n    output [1:0] g );\n"
                          "    assign g[0] = r[0];\n    assign g[1] = r[1] & !r[0];\nendmodule\n",
    "arbiter_toggle.v": "module solution (\n    input clk,\n    input [1:0] r,\n    output [1:0] g );\n"
                        "    reg turn = 1'b0;\n    always @(posedge clk) turn <= !turn;\n"
                        "    assign g[0] = !turn;\n    assign g[1] = turn;\nendmodule\n",
    "moore_toggle.v": "module solution (\n    input clk,\n    output out );\n"
                      "    reg state = 1'b0;\n    always @(posedge clk) state <= !state;\n"
                      "    assign out = state;\nendmodule\n",
    "moore_toggle_high.v": "module solution (\n    input clk,\n    output out );\n"
                           "    reg state = 1'b1;\n    always @(posedge clk) state <= !state;\n"
                           "    assign out = state;\nendmodule\n",
    "detector_n2.v": detector_v(2),
    "detector_n3.v": detector_v(3),
    "detector_n2_eager.v": detector_v(2, complete="|next"),
    "detector_n2_early.v": detector_v(2, started=True),
    "detector_n2_silent.v": "module solution (\n    input clk,\n    input [1:0] finished,\n"
                            "    output allFinished );\n    assign allFinished = 1'b0;\nendmodule\n",
    "detector_param.v": detector_v(0, param=True),
    "detector_even_only.v": detector_v(0, complete="(n % 2 == 0) ? &next : (next[0] & next[n-1])", param=True),
}

# ---- circuits -----------------------------------------------------------------


def one_input(fn):
    b = Builder()
    fn(b, b.input("a"))
    return b


def delay_like(invert):
    b = Builder()
    a = b.input("a")
    prev = b.latch("prev")
    b.set_next(prev, a)
    b.output(prev ^ int(invert), "b")
    return b


def sticky():
    b = Builder()
    a = b.input("a")
    seen = b.latch("seen")
    b.set_next(seen, b.or_(seen, a))
    b.output(seen, "b")
    return b


def clairvoyant_env():
    b = Builder()
    out = b.input("b")
    prev = b.latch("prev")
    b.set_next(prev, out ^ 1)
    b.output(prev, "a")
    return b


def arbiter(kind):
    b = Builder()
    r = [b.input(f"r[{i}]") for i in range(2)]
    if kind == "both":
        g = r
    elif kind == "priority":
        g = [r[0], b.and_(r[1], r[0] ^ 1)]
    else:
        turn = b.latch("turn")
        b.set_next(turn, turn ^ 1)
        g = [turn ^ 1, turn]
    for i, lit in enumerate(g):
        b.output(lit, f"g[{i}]")
    return b


def moore_toggle(reset=0):
    b = Builder()
    s = b.latch("state", reset)
    b.set_next(s, s ^ 1)
    b.output(s, "out")
    return b


def detector(n, mode="all"):
    b = Builder()
    fin = [b.input(f"finished[{i}]") for i in range(n)]
    seen = [b.latch(f"seen[{i}]") for i in range(n)]
    started = b.latch("started") if mode == "early" else None
    nxt = [b.or_(s, f) for s, f in zip(seen, fin)]
    if mode == "edges":
        done = b.and_(nxt[0], nxt[-1])
    else:
        done = nxt[0]
        for x in nxt[1:]:
            done = b.or_(done, x) if mode == "eager" else b.and_(done, x)
    if started is not None:
        b.set_next(started, 1)
        done = b.or_(done, started ^ 1)
    for s, x in zip(seen, nxt):
        b.set_next(s, b.and_(done ^ 1, x))
    b.output(done, "allFinished")
    return b


def silent():
    b = Builder()
    for i in range(2):
        b.input(f"finished[{i}]")
    b.output(0, "allFinished")
    return b


CIRCUITS = {
    "buffer_inverted.aag": one_input(lambda b, a: b.output(a ^ 1, "b")),
    "buffer.aag": one_input(lambda b, a: b.output(a, "b")),
    "delay_inverted.aag": delay_like(True),
    "delay.aag": delay_like(False),
    "sticky.aag": sticky(),
    "clairvoyant_env.aag": clairvoyant_env(),
    "arbiter_both.aag": arbiter("both"),
    "arbiter_priority.aag": arbiter("priority"),
    "arbiter_toggle.aag": arbiter("toggle"),
    "moore_toggle.aag": moore_toggle(),
    "moore_toggle_high.aag": moore_toggle(1),
    "detector_n2.aag": detector(2),
    "detector_n3.aag": detector(3),
    "detector_n2_eager.aag": detector(2, "eager"),
    "detector_n2_early.aag": detector(2, "early"),
    "detector_edges_n3.aag": detector(3, "edges"),
    "detector_n2_silent.aag": silent(),
}

# module, circuit[, spec, binding]
CACHE = [
    ("buffer_inverted.v", "buffer_inverted.aag"),
    ("buffer.v", "buffer.aag"),
    ("delay_inverted.v", "delay_inverted.aag"),
    ("delay.v", "delay.aag"),
    ("sticky.v", "sticky.aag"),
    ("clairvoyant_env.v", "clairvoyant_env.aag"),
    ("arbiter_both.v", "arbiter_both.aag"),
    ("arbiter_priority.v", "arbiter_priority.aag"),
    ("arbiter_toggle.v", "arbiter_toggle.aag"),
    ("moore_toggle.v", "moore_toggle.aag"),
    ("moore_toggle_high.v", "moore_toggle_high.aag"),
    ("detector_n2.v", "detector_n2.aag"),
    ("detector_n3.v", "detector_n3.aag"),
    ("detector_n2_eager.v", "detector_n2_eager.aag"),
    ("detector_n2_early.v", "detector_n2_early.aag"),
    ("detector_n2_silent.v", "detector_n2_silent.aag"),
    ("detector_param.v", "detector_n2.aag", "param/detector_n3.tlsf", "n=2"),
    ("detector_param.v", "detector_n3.aag", "param/detector_n3.tlsf", "n=3"),
    ("detector_even_only.v", "detector_n2.aag", "param/detector_n3.tlsf", "n=2"),
    ("detector_even_only.v", "detector_edges_n3.aag", "param/detector_n3.tlsf", "n=3"),
]

# ---- natural-language set ---------------------------------------------------------

NATURAL = {
    "buffer": "There is one input a and one output b. At every step the output b must equal the input a.\n",
    "delay": "There is one input a and one output b. At every step, the value of b in the next step must "
             "equal the current value of a.\n",
    "sticky": "There is one input a and one output b. The output b starts low. Whenever a is high, b must "
              "be high in the next step, and once b is high it stays high forever.\n",
    "detector_n2": (HERE.parent / "nl" / "detector.txt").read_text().replace("27", "2"),
    "moore_toggle": "The system has no inputs and one output out, and it reacts before seeing inputs. The "
                    "output starts low and alternates between low and high at every step.\n",
}

AUTO = {
    "buffer": ["MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  GUARANTEE { G (a <-> b); }\n}\n"],
    "delay": [
        "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  GUARANTEE { G (X b <-> a) }\n",
        "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  GUARANTEE { G (next(b) <-> a); }\n}\n",
        "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  GUARANTEE { G (X b <-> a); }\n}\n",
    ],
    "sticky": [
        "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  PRESET { !b; }\n  GUARANTEE { G (a -> X b) }\n}\n",
        "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  PRESET { !b; }\n  GUARANTEE { G (a => X b); }\n}\n",
        "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b }\n  PRESET { !b; }\n  GUARANTEE { G (a -> X b); }\n}\n",
    ],
    "detector_n2": [
        "GLOBAL {\n  PARAMETERS { n = 2; }\n}\nMAIN {\n  INPUTS { finished[n]; }\n  OUTPUTS { allFinished; }\n"
        "  ASSERT {\n    G !allFinished -> ||[0<=i<n] G !finished[i];\n"
        "    &&[0<=i<n] (allFinished -> X (!allFinished W finished[i]));\n  }\n}\n"
    ],
    "moore_toggle": [
        "INFO {\n  SEMANTICS: Moore\n  TARGET:    Moore\n}\nMAIN {\n  INPUTS { }\n  OUTPUTS { out; }\n"
        "  GUARANTEE { G (out <-> X !out); }\n}\n"
    ],
}

VIA_AUTO = {"buffer": "buffer.v", "delay": "delay.v", "sticky": "sticky.v",
            "detector_n2": "detector_n2_early.v", "moore_toggle": "moore_toggle_high.v"}
DIRECT = {"buffer": "buffer.v", "delay": "delay.v", "sticky": "sticky.v",
          "detector_n2": "detector_n2.v", "moore_toggle": "moore_toggle.v"}

# ---- scripted responses -----------------------------------------------------------


class Scripted:
    def __init__(self, natsyn, out):
        self.natsyn, self.out = natsyn, out
        if out.exists():
            shutil.rmtree(out)
        out.mkdir(parents=True)

    def key(self, kind, source, attempt):
        return subprocess.run([self.natsyn, "fixture-key", "--kind", kind, str(source), "--attempt", str(attempt)],
                              check=True, capture_output=True, text=True).stdout.strip()

    def put(self, kind, source, attempt, text):
        stem = self.key(kind, source, attempt)
        (self.out / f"{stem}.txt").write_text(text)
        meta = {"reasoning_tokens": 1000 * (attempt + 1) + len(text) % 97,
                "output_tokens": len(text) // 4, "latency_seconds": 1.5}
        (self.out / f"{stem}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")

    def module(self, kind, source, attempt, name):
        body = (HERE / "modules" / name).read_text()
        self.put(kind, source, attempt, f"Here is the implementation.\n\n```verilog\n{body}```\n")

    def chain(self, spec, names, first="synthesis"):
        for k, name in enumerate(names):
            self.module(first if k == 0 else "repair", spec, k, name)


def main():
    natsyn = sys.argv[1] if len(sys.argv) > 1 else str(HERE.parents[2] / "build" / "tools" / "natsyn")
    for d in ("modules", "aiger", "scripted"):
        (HERE / d).mkdir(exist_ok=True)
    for name, text in MODULES.items():
        (HERE / "modules" / name).write_text(text)
    for name, b in CIRCUITS.items():
        (HERE / "aiger" / name).write_text(b.render())
    rows = ["# module\tcircuit[\tspecification\tparameter binding]"]
    for row in CACHE:
        cols = [f"modules/{row[0]}", f"aiger/{row[1]}"] + list(row[2:])
        rows.append("\t".join(cols))
    (HERE / "cache.tsv").write_text("\n".join(rows) + "\n")

    syn = HERE / "synthesis"
    s = Scripted(natsyn, HERE / "scripted" / "synthesis")
    s.chain(syn / "buffer.tlsf", ["buffer_inverted.v", "buffer.v"])
    s.chain(syn / "delay.tlsf", ["buffer.v", "delay_inverted.v", "delay.v"])
    s.chain(syn / "clairvoyant.tlsf", ["clairvoyant_env.v"])
    s.chain(syn / "arbiter.tlsf", ["arbiter_both.v", "arbiter_priority.v", "arbiter_toggle.v"])
    s.chain(syn / "moore_toggle.tlsf", ["moore_toggle.v"])
    s.chain(syn / "detector_n2.tlsf", ["detector_n2.v"])
    s.chain(syn / "detector_n3.tlsf", ["detector_n3.v"])
    s.chain(syn / "sticky.tlsf", ["sticky.v"])

    for k, names in enumerate([["detector_n2.v"],
                               ["detector_n2_eager.v", "detector_n2.v"],
                               ["detector_n2_eager.v", "detector_n2_silent.v", "detector_n2.v"]]):
        Scripted(natsyn, HERE / "scripted" / f"detector_solved_at_{k}").chain(syn / "detector_n2.tlsf", names)

    param = HERE / "param" / "detector_n3.tlsf"
    Scripted(natsyn, HERE / "scripted" / "param").chain(param, ["detector_even_only.v", "detector_param.v"],
                                                        first="param-synthesis")
    Scripted(natsyn, HERE / "scripted" / "param_correct").chain(param, ["detector_param.v"],
                                                                first="param-synthesis")

    nat = HERE / "natural"
    (nat / "nl").mkdir(parents=True, exist_ok=True)
    s = Scripted(natsyn, HERE / "scripted" / "natural")
    scratch = HERE / "scripted" / ".scratch"
    scratch.mkdir(exist_ok=True)
    metadata = {}
    for inst, text in NATURAL.items():
        nl = nat / "nl" / f"{inst}.txt"
        nl.write_text(text)
        metadata[inst] = {"realizability": "realizable", "nl": f"nl/{inst}.txt"}
        for k, spec in enumerate(AUTO[inst]):
            s.put("autoformalize" if k == 0 else "autoformalize-repair", nl, k,
                  f"The formalization follows.\n\n```tlsf\n{spec}```\n")
        first = scratch / f"{inst}.tlsf"
        first.write_text(AUTO[inst][0])
        s.module("synthesis", first, 0, VIA_AUTO[inst])
        s.module("direct-nl", nl, 0, DIRECT[inst])
    shutil.rmtree(scratch)
    (nat / "metadata.json").write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
