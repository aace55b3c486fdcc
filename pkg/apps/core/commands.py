import json
import logging

from django.core.management.base import BaseCommand, CommandError

from .exceptions import GradelocError

logger = logging.getLogger(__name__)


class GradelocCommand(BaseCommand):
    """
    Base for simulator commands. Subclasses implement ``handle_command``;
    simulator errors surface as CommandError with their exit code
    (3 for invalid input, 4 for runtime failures).
    """

    def handle(self, *args, **options):
        try:
            return self.handle_command(*args, **options)
        except GradelocError as exc:
            logger.debug('%s failed', self.__class__.__module__, exc_info=True)
            raise CommandError(str(exc), returncode=exc.exit_code) from exc

    def handle_command(self, *args, **options):
        raise NotImplementedError('subclasses of GradelocCommand must provide a handle_command() method')

    def write_json(self, payload):
        self.stdout.write(json.dumps(payload, ensure_ascii=False, indent=4, sort_keys=True))
