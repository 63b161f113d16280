"""marlab: a desk-scale cooperative multi-agent RL laboratory.

Per-transition TD(lambda) values come from a density-ratio discriminator
trained on a pair of replay buffers; exact tabular oracles certify the
underlying return-operator theory; a CLI harness keeps runs reproducible.
"""

__version__ = "0.1.0"
