"""Universal PAC learning over the BCL bytecode language.

Modules: ``vm`` (interpreter and enumeration), ``halting`` (sound decider),
``bounds`` (sample requirements), ``oracle`` (distributions, concepts,
seeded sampling), ``learner`` (dovetail and halting-oracle learners),
``baselines``, ``adversary`` (over-sampling lower bound), ``harness``
(Monte Carlo checks) and ``cli``.
"""

__version__ = "0.1.0"
