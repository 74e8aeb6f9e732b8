#!/usr/bin/env python3
"""Reads {"x": [...]} on stdin and prints the sum of squares."""
import json
import sys

x = json.loads(sys.stdin.readline())["x"]
print(repr(float(sum(v * v for v in x))))
