from experiments.management.experiment_command import ExperimentCommand


class Command(ExperimentCommand):
    help = "Noise budget at labelled points along the loss chain"
    experiment = "budget"
