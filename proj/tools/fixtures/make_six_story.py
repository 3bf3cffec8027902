"""Regenerates six_story.json: a six-story, four-walls-per-direction light-frame building.

Floors are 18 m x 12 m rigid diaphragms. Wall lines sit at fixed offsets from the mass
center; per-story multipliers taper wall strength with height.
"""
import json
import pathlib

STORY_MULT = [1.0, 0.92, 0.8, 0.65, 0.48, 0.3]
X_LINES = [(-6.0, 1.2), (-2.0, 0.9), (2.0, 0.9), (6.0, 1.0)]  # (y offset, factor) for x-resisting walls
Y_LINES = [(-9.0, 1.0), (-3.0, 1.0), (3.0, 0.9), (9.0, 1.1)]  # (x offset, factor) for y-resisting walls
PLAN = (18.0, 12.0)


def main():
    masses = [40.0] * 5 + [30.0]
    floors = [{"mass_t": m, "rotational_inertia_t_m2": round(m * (PLAN[0] ** 2 + PLAN[1] ** 2) / 12.0, 6)}
              for m in masses]
    walls = []
    for s, mult in enumerate(STORY_MULT, start=1):
        for i, (y, f) in enumerate(X_LINES, start=1):
            walls.append({"id": f"S{s}X{i}", "story": s, "type": "sheathed",
                          "origin_m": [0.0, y], "direction": [1.0, 0.0],
                          "strength_scale": round(mult * f, 6)})
        for i, (x, f) in enumerate(Y_LINES, start=1):
            walls.append({"id": f"S{s}Y{i}", "story": s, "type": "sheathed",
                          "origin_m": [x, 0.0], "direction": [0.0, 1.0],
                          "strength_scale": round(mult * f, 6)})
    channels = [{"dof": f"F{f}_{c}", "noise_psd_m2_s3": 1e-5} for f in (3, 6) for c in ("ux", "uy", "rz")]
    cfg = {
        "schema_version": 1,
        "seed": 20090714,
        "building": {
            "story_heights_m": [3.0] * 6,
            "floors": floors,
            "wall_types": {
                "sheathed": {
                    "saws": {"F0_kN": 150.0, "FI_kN": 19.95, "DU_mm": 60.0, "S0_kN_per_mm": 20.0,
                             "R1": 0.05, "R2": -0.04, "R3": 1.1, "R4": 0.01, "alpha": 0.8, "beta": 1.1},
                    "damage": {"delta_u_mm": 100.0, "F_ey_kN": 150.0, "x_ns_in": 6.0, "x_wh": 1.0},
                }
            },
            "walls": walls,
            "damping": {"rayleigh": {"zeta_1": 0.05, "mode_1": 1, "zeta_2": 0.05, "mode_2": 6}},
            "process_noise": "ground",
        },
        "ground_motion": {"file": "ground_motion_6story.csv", "x_channel": "ug_x", "y_channel": "ug_y",
                          "scale": 1.0},
        "instrumentation": {"channels": channels},
        "gain": {"noise_model": {"S_ww": [1e-2, 1e-2], "S_vv": [1e-6] * 6}},
        "integrator": {"dt_s": 0.01, "newmark_beta": 0.25, "newmark_gamma": 0.5},
        "signal": {"highpass_corner_hz": 0.1, "highpass_order": 4},
        "verification": {"max_peak_drift_error": 0.15, "max_wall_energy_error": 0.20,
                         "max_energy_balance_error": 0.01},
        "outputs": {"directory": "out_six_story", "history_csv": True, "plots": True},
    }
    out = pathlib.Path(__file__).with_name("six_story.json")
    out.write_text(json.dumps(cfg, indent=2) + "\n")


if __name__ == "__main__":
    main()
