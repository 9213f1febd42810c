"""Python access to the hisqa annotation engine.

Heavy lifting happens in the native ``_hisqa`` module; functions that return
structured records hand back parsed JSON.
"""
import json as _json

from . import _hisqa
from ._hisqa import (
    JOINT_NAMES,
    HisqaError,
    act_loss,
    cont_loss,
    facing_direction,
    gaussian_weights,
    judge_prompt,
    nearest_distance,
    object_pos_encoding,
    parse_judge_score,
    pearson,
    sf_encode,
    signed_heading_angle,
    spa_loss,
    subtasks,
    task_score,
    tf_encode,
)


def _config_text(config):
    if config is None:
        return ""
    return config if isinstance(config, str) else _json.dumps(config)


def scene_graph(scene_path):
    return _json.loads(_hisqa.scene_graph(str(scene_path)))


def annotate_frame(scene_path, joints, config=None):
    return _json.loads(_hisqa.annotate_frame(str(scene_path), joints, _config_text(config)))


def annotate(scene_path, motion_path, config=None):
    return _json.loads(_hisqa.annotate(str(scene_path), str(motion_path), _config_text(config)))


def aux_labels(scene_path, motion_path, activity, config=None):
    return _json.loads(_hisqa.aux_labels(str(scene_path), str(motion_path), activity, _config_text(config)))


def qa_prompt(scene_path, motion_path, activity, subtask, config=None):
    return _hisqa.qa_prompt(str(scene_path), str(motion_path), activity, subtask, _config_text(config))


def config_hash(config=None):
    return _hisqa.config_hash(_config_text(config))


def run_cli(*args):
    """Runs the command-line tool in-process; returns (status, stdout, stderr)."""
    return _hisqa.run_cli([str(a) for a in args])


__all__ = [
    "JOINT_NAMES", "HisqaError", "act_loss", "annotate", "annotate_frame", "aux_labels", "config_hash",
    "cont_loss", "facing_direction", "gaussian_weights", "judge_prompt", "nearest_distance",
    "object_pos_encoding", "parse_judge_score", "pearson", "qa_prompt", "run_cli", "scene_graph",
    "sf_encode", "signed_heading_angle", "spa_loss", "subtasks", "task_score", "tf_encode",
]
