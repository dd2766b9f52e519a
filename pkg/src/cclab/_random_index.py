"""Random consistency index by matrix order.

Generated by scripts/generate_random_index.py (samples=100000, seed=20240601). Do not edit by hand.
"""

SAMPLES = 100000
SEED = 20240601

RANDOM_INDEX = {
    1: 0.0,
    2: 0.0,
    3: 0.5248,
    4: 0.8849,
    5: 1.1073,
    6: 1.2488,
    7: 1.3407,
    8: 1.4055,
    9: 1.451,
    10: 1.4856,
    11: 1.5132,
    12: 1.5363,
    13: 1.5559,
    14: 1.5704,
    15: 1.5831,
}
