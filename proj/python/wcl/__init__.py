"""Weighted centroid localization: simulation, analysis, distributed protocol."""

import json as _json

try:
    from . import _wcl
except ImportError:  # in-tree build: the extension sits next to the package dir
    import _wcl

Point2 = _wcl.Point2
ChannelParams = _wcl.ChannelParams
ShadowingMode = _wcl.ShadowingMode
Rng = _wcl.Rng
WclError = _wcl.WclError

place_fixed_grid = _wcl.place_fixed_grid
place_random_grid = _wcl.place_random_grid
place_uniform_disk = _wcl.place_uniform_disk
place_uniform_square = _wcl.place_uniform_square
apply_position_noise = _wcl.apply_position_noise
mean_received_power = _wcl.mean_received_power
sample_rss = _wcl.sample_rss
border_pmin = _wcl.border_pmin
wcl_estimate = _wcl.wcl_estimate
strongest_node_estimate = _wcl.strongest_node_estimate
lateration_estimate = _wcl.lateration_estimate
localization_error = _wcl.localization_error
analyze_placement = _wcl.analyze_placement
link_tx_power = _wcl.link_tx_power
cwcl_ops = _wcl.cwcl_ops
dwcl_ops = _wcl.dwcl_ops
dwcl_message_count = _wcl.dwcl_message_count
figure_ids = _wcl.figure_ids

def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)

def run_experiment(config):
    """Monte Carlo run; `config` is a dict or JSON string in the CLI format."""
    return _wcl.run_experiment(_text(config))

def run_theory(config):
    return _wcl.run_theory(_text(config))

def run_dwcl(config):
    return _wcl.run_dwcl(_text(config))

def run_overhead(config):
    return _wcl.run_overhead(_text(config))
