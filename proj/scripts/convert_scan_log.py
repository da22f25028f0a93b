#!/usr/bin/env python3
"""Convert a plain-ASCII scan-graph log into the engine's NODE/P scan format.

The input format is the one used by public occupancy-mapping datasets: a pose
line `NODE x y z roll pitch yaw` opens each scan, followed by one `x y z`
point per line in the sensor frame. This tool applies the full 6DOF pose
(translation plus Rz(yaw)*Ry(pitch)*Rx(roll)) to every point and emits world
frame scans:

    NODE ox oy oz
    P wx wy wz

Ray origins are the pose translations. Most logs carry identity rotations;
when a pose does rotate, a note is printed to stderr so surprising axis
conventions do not pass silently.
"""

import argparse
import math
import os
import sys


def rotation_matrix(roll, pitch, yaw):
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return (
        (cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr),
        (sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr),
        (-sp, cp * sr, cp * cr),
    )


def fmt(v):
    return "%.17g" % v


class LogFormatError(Exception):
    pass


def convert(lines, out, source_name):
    pose = None  # (translation, rotation) of the open scan
    scans = 0
    points = 0
    rotated_scans = 0
    body = []

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "NODE":
            if len(fields) != 7:
                raise LogFormatError(
                    f"line {lineno}: NODE needs x y z roll pitch yaw, got {len(fields) - 1} fields"
                )
            try:
                x, y, z, roll, pitch, yaw = (float(f) for f in fields[1:])
            except ValueError:
                raise LogFormatError(f"line {lineno}: NODE with non-numeric field")
            pose = ((x, y, z), rotation_matrix(roll, pitch, yaw))
            if (roll, pitch, yaw) != (0.0, 0.0, 0.0):
                rotated_scans += 1
            scans += 1
            body.append(f"NODE {fmt(x)} {fmt(y)} {fmt(z)}")
        else:
            if pose is None:
                raise LogFormatError(f"line {lineno}: point before any NODE pose")
            if len(fields) != 3:
                raise LogFormatError(
                    f"line {lineno}: point needs x y z, got {len(fields)} fields"
                )
            try:
                p = tuple(float(f) for f in fields)
            except ValueError:
                raise LogFormatError(f"line {lineno}: point with non-numeric field")
            t, r = pose
            w = tuple(
                r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2] + t[i] for i in range(3)
            )
            points += 1
            body.append(f"P {fmt(w[0])} {fmt(w[1])} {fmt(w[2])}")

    out.write(f"# converted from {source_name}: {scans} scans, {points} points\n")
    for line in body:
        out.write(line + "\n")
    return scans, points, rotated_scans


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", help="scan-graph log (NODE pose + point lines)")
    parser.add_argument("-o", "--output", help="output scan file (default: stdout)")
    args = parser.parse_args()

    try:
        with open(args.input, "r") as f:
            lines = f.readlines()
    except OSError as e:
        print(f"convert_scan_log: {e}", file=sys.stderr)
        return 1

    try:
        if args.output:
            with open(args.output, "w") as out:
                scans, points, rotated = convert(lines, out, os.path.basename(args.input))
        else:
            scans, points, rotated = convert(lines, sys.stdout, os.path.basename(args.input))
    except LogFormatError as e:
        print(f"convert_scan_log: {args.input}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"convert_scan_log: {e}", file=sys.stderr)
        return 1

    print(f"convert_scan_log: {scans} scans, {points} points", file=sys.stderr)
    if rotated:
        print(
            f"convert_scan_log: note: {rotated} of {scans} poses carry a rotation; "
            "points were transformed by the full 6DOF pose",
            file=sys.stderr,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
