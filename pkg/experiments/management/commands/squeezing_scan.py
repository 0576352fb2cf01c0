from experiments.management.experiment_command import ExperimentCommand


class Command(ExperimentCommand):
    help = "Squeezing after the sensor versus internal angle and reflectivity"
    experiment = "squeezing_scan"
