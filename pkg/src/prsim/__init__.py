"""Link-level simulation and analysis of predictive relay selection.

Subpackages and modules:

* ``numerics``     special functions (J0, I0, E1), capacity kernel, quadrature
* ``rng``          seeded splittable random streams
* ``channel``      Jakes fading series, outdated-CSI model, SNR bookkeeping
* ``selection``    relay-selection rules (best-relay, pair, direct transmission)
* ``analytics``    closed-form outage and ergodic capacity for DF/AF selection
* ``predictor``    from-scratch recurrent networks (RNN/LSTM/GRU) and training
* ``simulator``    Monte-Carlo and frame-level protocol simulation
* ``config``       experiment configuration files
* ``cli``          experiment runner (gen-data / train / outage / capacity / ...)
"""

__version__ = "0.1.0"
