"""
Which channels admit a recycling code?
======================================

The recycler must undo a click on the whole codespace.  This holds for the
balanced ladder, fails once the two rungs decay at different rates, and no
two-dimensional codespace works when the two transitions are told apart.
"""
from qutrit_feedback.harness import verify_codes

for kwargs in ({}, {"beta": 2.0}, {"structure": "V"}, {"structure": "Lambda"}):
    ok, lines = verify_codes(**kwargs)
    print(kwargs or "balanced ladder", "->", "ok" if ok else "fails")
    for line in lines:
        print("   ", line)
