import json
import logging
from dataclasses import replace
from pathlib import Path

from django.conf import settings
from rest_framework.exceptions import ErrorDetail

from apps.core.exceptions import ConfigurationError
from .serializers import ScenarioSerializer

logger = logging.getLogger(__name__)


def flatten_errors(detail, prefix=''):
    """Yield (dotted.path, message) pairs from nested serializer errors."""
    if isinstance(detail, dict):
        for key, value in detail.items():
            yield from flatten_errors(value, f'{prefix}.{key}' if prefix else str(key))
    elif isinstance(detail, list):
        if all(isinstance(item, (str, ErrorDetail)) for item in detail):
            for item in detail:
                yield prefix, str(item)
        else:
            for index, item in enumerate(detail):
                yield from flatten_errors(item, f'{prefix}.{index}' if prefix else str(index))
    else:
        yield prefix, str(detail)


def resolve_scenario_path(name_or_path):
    path = Path(name_or_path)
    if path.is_file():
        return path
    shipped = Path(settings.GRADELOC['SCENARIO_DIR']) / f'{name_or_path}.json'
    if shipped.is_file():
        return shipped
    raise ConfigurationError(f'no scenario file or shipped scenario named {name_or_path!r}', field='scenario')


def parse_scenario(data, source='<scenario>'):
    serializer = ScenarioSerializer(data=data)
    if not serializer.is_valid():
        problems = '; '.join(
            f'{path}: {message}' if path else message
            for path, message in flatten_errors(serializer.errors)
        )
        raise ConfigurationError(problems, field=source)
    return serializer.validated_data['scenario']


def load_scenario(name_or_path, seed=None):
    """Read, validate and build a scenario; ``seed`` overrides master_seed."""
    path = resolve_scenario_path(name_or_path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f'line {exc.lineno} column {exc.colno}: {exc.msg}', field=str(path)) from exc
    scenario = parse_scenario(data, source=str(path))
    if seed is not None:
        if not 0 <= seed < 2 ** 63:
            raise ConfigurationError('must lie in [0, 2**63)', field='seed')
        scenario = replace(scenario, master_seed=seed)
    logger.debug('Loaded scenario %s from %s', scenario.name, path)
    return scenario
