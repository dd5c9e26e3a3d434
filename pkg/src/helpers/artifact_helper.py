"""
File: artifact_helper.py
File-Path: src/helpers/artifact_helper.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    staged output directories: artifacts are written into a scratch
    directory next to the destination and moved into place only when the
    whole command succeeded

Inputs:
    destination directory

Outputs:
    the populated destination directory, or nothing on failure
"""

import os
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path

from helpers.errors import ArtifactError
from helpers.logging_helper import log_stage


@contextmanager
def staged_output(destination):
    """
    yields a scratch directory; on success its files replace same-named files
    in destination, on any error the scratch directory is removed
    """
    destination = Path(destination)
    destination.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix='.coldmap-stage-', dir=destination.parent))
    try:
        yield stage
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        raise

    try:
        destination.mkdir(parents=True, exist_ok=True)
        for item in sorted(stage.iterdir()):
            os.replace(item, destination / item.name)
    except OSError as error:
        raise ArtifactError(f"could not publish outputs to {destination}: {error}") from None
    finally:
        shutil.rmtree(stage, ignore_errors=True)
    log_stage("outputs written", component='artifact', path=str(destination))


@contextmanager
def staged_file(path):
    """single-file variant: yields a temp path that replaces path on success"""
    path = Path(path)
    with staged_output(path.parent) as stage:
        yield stage / path.name
