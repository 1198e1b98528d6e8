"""Brute-force quadrature oracle for the ratio-normal paradox instance.

Writes paradox_oracle.json. The limits of E[g(Z) | window] are

  via Y:      int g(z) phi(z) dz
  via W=Y/Z:  int g(z) |z| phi(z) dz / int |z| phi(z) dz

for independent standard normals (Z, Y), phi the standard normal density.
"""
import json

import mpmath as mp

mp.mp.dps = 30
phi = lambda z: mp.exp(-z * z / 2) / mp.sqrt(2 * mp.pi)


def integral(f):
    return mp.quad(f, [-mp.inf, 0, mp.inf])


mass_w = integral(lambda z: abs(z) * phi(z))
out = {
    "second_moment_via_y": float(integral(lambda z: z * z * phi(z))),
    "second_moment_via_w": float(integral(lambda z: z * z * abs(z) * phi(z)) / mass_w),
    "abs_mean_via_y": float(integral(lambda z: abs(z) * phi(z))),
    "abs_mean_via_w": float(integral(lambda z: z * z * phi(z)) / mass_w),
    "w_density_normalizer": float(mass_w),
}
out["second_moment_gap"] = out["second_moment_via_w"] - out["second_moment_via_y"]
with open("paradox_oracle.json", "w") as f:
    json.dump(out, f, indent=2)
    f.write("\n")
