from experiments.management.experiment_command import ExperimentCommand


class Command(ExperimentCommand):
    help = "Sensorgram of a Langmuir binding run at a locked angle"
    experiment = "bind"
