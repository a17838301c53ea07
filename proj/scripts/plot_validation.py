#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# beamspot   Distributed massive MIMO beamforming and PA distortion analysis
# Copyright (C) 2026 beamspot contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Plot a `beamspot validate` JSON report: estimate vs expectation."""

import argparse
import json
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def db(v):
    return 10.0 * math.log10(v) if v > 0.0 else float("nan")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("report", help="JSON report file")
    ap.add_argument("--out", default="validation.png", help="output image")
    args = ap.parse_args()

    with open(args.report) as f:
        doc = json.load(f)
    bins = doc["bins"]
    freq = [b["freq_offset_hz"] / 1e6 for b in bins]

    fig, (top, bottom) = plt.subplots(
        2, 1, figsize=(8, 6.5), sharex=True, height_ratios=[2, 1]
    )
    top.plot(freq, [db(b["expected"]) for b in bins], "k-", label="analytic engine")
    top.plot(
        freq,
        [db(b["empirical"]) for b in bins],
        "r.",
        markersize=3,
        label="Monte Carlo (Welch)",
    )
    top.set_ylabel("PSD [dB/Hz]")
    status = "PASS" if doc["pass"] else "FAIL"
    top.set_title(
        f"{status}: {doc['total_samples']} samples, worst in-band "
        f"{doc['worst_inband_rel']:.3g}, worst shoulder {doc['worst_shoulder_rel']:.3g}"
    )
    top.grid(True, alpha=0.3)
    top.legend()

    tested = [b for b in bins if b["in_band"] or b["shoulder"]]
    bottom.plot(
        [b["freq_offset_hz"] / 1e6 for b in tested],
        [100.0 * b["rel_error"] for b in tested],
        "b.",
        markersize=3,
    )
    bottom.axhline(100.0 * doc["inband_tol"], color="g", linestyle="--", label="in-band tol")
    bottom.axhline(
        100.0 * doc["shoulder_tol"], color="m", linestyle="--", label="shoulder tol"
    )
    bottom.set_xlabel("frequency offset [MHz]")
    bottom.set_ylabel("relative error [%]")
    bottom.grid(True, alpha=0.3)
    bottom.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=140)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
