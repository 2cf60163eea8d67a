from pathlib import Path

from ...simulation import simulate
from ...streams import events_path_for, write_stream
from ..base import ExperimentCommand

STREAM_FILENAME = 'stream.csv'


class Command(ExperimentCommand):
    help = 'Simulate a risk stream and write the stream and events files.'

    def run(self, options):
        cfg = self.load_config(options)
        path = Path(cfg.output_dir) / STREAM_FILENAME

        gt = simulate(cfg.sim)
        write_stream(gt, path)

        self.stdout.write('{0}\n{1}'.format(path, events_path_for(path)))
