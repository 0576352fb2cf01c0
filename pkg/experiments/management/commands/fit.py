from experiments.management.experiment_command import ExperimentCommand


class Command(ExperimentCommand):
    help = "Fit binding rates to synthetic sensorgrams at coherent and squeezed noise"
    experiment = "fit"
