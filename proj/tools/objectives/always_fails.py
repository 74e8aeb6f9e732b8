#!/usr/bin/env python3
import sys

sys.stdin.readline()
print("not a number")
