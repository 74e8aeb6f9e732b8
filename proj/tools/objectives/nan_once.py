#!/usr/bin/env python3
"""Sum of squares, except the first call prints nan.

The marker file named by the first argument records that the nan was sent.
"""
import json
import os
import sys

x = json.loads(sys.stdin.readline())["x"]
marker = sys.argv[1]
if not os.path.exists(marker):
    open(marker, "w").close()
    print("nan")
else:
    print(repr(float(sum(v * v for v in x))))
