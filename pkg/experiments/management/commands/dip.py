from experiments.management.experiment_command import ExperimentCommand


class Command(ExperimentCommand):
    help = "Sweep the internal angle and locate the SPR absorption dip"
    experiment = "dip"
