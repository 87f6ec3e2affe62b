"""Overloaded multi-satellite reception: when N co-channel satellites hit a
dish with only M < N feeds, plain per-stream demodulation fails and joint
detection over the whole symbol vector is required.

The package provides the full experiment stack:

* :mod:`satrx.scenario` — dish/feed geometry, Airy-pattern channel matrices,
  correlated receiver noise;
* :mod:`satrx.constellation` — QPSK / 8PSK / 16APSK alphabets;
* :mod:`satrx.preprocessing` — MRC and Wiener-Hopf SINR front ends with
  noise whitening on the reduced-rank equivalent channel;
* :mod:`satrx.detection` — exhaustive joint-ML search and the list-based
  group-wise search detector (LGSD), with exact squaring-operation counters;
* :mod:`satrx.harness` — paired Monte-Carlo BER sweeps with deterministic
  seeding and Wilson confidence intervals;
* :mod:`satrx.config` / :mod:`satrx.cli` — INI run configs and the
  ``satrx`` command-line tool.
"""

from .config import (ConfigError, DetectorToken, RunConfig, build_plan,
                     parse_config, serialize_config)
from .constellation import Constellation, bit_errors, demap_hard, \
    make_constellation, modulate
from .detection import (DEFAULT_SEARCH_BUDGET, CandidateList, DetectionResult,
                        JointMLDetector, LgsdConfig, LgsdDetector, OpCounter,
                        SearchSpaceTooLargeError, allocate_groups, ble_pass,
                        glo_pass, jml, jml_batch, lgsd, lgsd_batch)
from .harness import (BerRecord, DetectorSpec, ExperimentPlan, default_label,
                      records_to_csv, run_point, run_sweep, wilson_interval,
                      write_csv)
from .preprocessing import (CovarianceSet, MrcPreprocessor,
                            WienerHopfPreprocessor, build_covariances,
                            build_mrc, build_wiener_hopf, sinr)
from .scenario import (NoiseModel, Scenario, aperture_gain, beamwidth_3db,
                       build_channel, default_scenario, draw_noise,
                       read_channel_csv, sigma2_for_snr, write_channel_csv)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # scenario
    "Scenario", "NoiseModel", "default_scenario", "build_channel",
    "sigma2_for_snr", "draw_noise", "aperture_gain", "beamwidth_3db",
    "write_channel_csv", "read_channel_csv",
    # constellation
    "Constellation", "make_constellation", "modulate", "demap_hard",
    "bit_errors",
    # preprocessing
    "CovarianceSet", "build_covariances", "sinr", "MrcPreprocessor",
    "WienerHopfPreprocessor", "build_mrc", "build_wiener_hopf",
    # detection
    "DEFAULT_SEARCH_BUDGET", "SearchSpaceTooLargeError", "OpCounter",
    "LgsdConfig", "CandidateList", "DetectionResult", "jml", "jml_batch",
    "allocate_groups", "ble_pass", "glo_pass", "lgsd", "lgsd_batch",
    "JointMLDetector", "LgsdDetector",
    # harness
    "DetectorSpec", "ExperimentPlan", "BerRecord", "default_label",
    "wilson_interval", "run_point", "run_sweep", "records_to_csv",
    "write_csv",
    # config
    "RunConfig", "DetectorToken", "ConfigError", "parse_config",
    "serialize_config", "build_plan",
]
