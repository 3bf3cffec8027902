"""Regenerates ground_motion_6story.csv: a two-component synthetic accelerogram.

Kanai-Tajimi filtered white noise under a trapezoidal-exponential envelope,
high-passed at 0.1 Hz, tapered at both ends and scaled to a target PGA per component.
"""
import json
import pathlib

import numpy as np
from scipy import signal

DT = 0.01
DURATION = 20.0
SEED = 20090714
PGA_G = {"ug_x": 0.35, "ug_y": 0.30}
G = 9.80665


def envelope(t):
    rise, flat_end, decay = 2.0, 9.0, 0.35
    e = np.ones_like(t)
    e[t < rise] = (t[t < rise] / rise) ** 2
    e[t > flat_end] = np.exp(-decay * (t[t > flat_end] - flat_end))
    return e


def kanai_tajimi(w, dt, wg=2 * np.pi * 1.6, zg=0.3):
    num = [2 * zg * wg, wg**2]
    den = [1.0, 2 * zg * wg, wg**2]
    b, a = signal.bilinear(num, den, fs=1.0 / dt)
    return signal.lfilter(b, a, w)


def main():
    rng = np.random.default_rng(SEED)
    t = np.arange(0.0, DURATION + DT / 2, DT)
    sos = signal.butter(4, 0.1, btype="highpass", fs=1.0 / DT, output="sos")
    channels = {}
    for name, pga in PGA_G.items():
        a = kanai_tajimi(rng.standard_normal(t.size), DT) * envelope(t)
        a = signal.sosfiltfilt(sos, a) * signal.windows.tukey(t.size, alpha=0.1)
        a *= pga * G / np.max(np.abs(a))
        channels[name] = a
    out = pathlib.Path(__file__).with_name("ground_motion_6story.csv")
    with out.open("w") as f:
        f.write("time," + ",".join(channels) + "\n")
        f.write("s," + ",".join("m/s^2" for _ in channels) + "\n")
        for k, tk in enumerate(t):
            f.write(f"{tk:.2f}," + ",".join(f"{channels[c][k]:.6e}" for c in channels) + "\n")
    meta = {"t0_s": 0.0, "dt_s": DT,
            "meta": {"source": "synthetic Kanai-Tajimi accelerogram", "seed": str(SEED)}}
    out.with_name(out.name + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


if __name__ == "__main__":
    main()
