from ...harness import run_experiment
from ...reports import emit_reports
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Run the strategy matrix over every seed and write the reports.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_experiment_arguments(parser)

    def run(self, options):
        cfg = self.load_config(options)
        result = run_experiment(cfg)
        for path in emit_reports(result, cfg.output_dir):
            self.stdout.write(str(path))
