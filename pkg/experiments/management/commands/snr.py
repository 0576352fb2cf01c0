from experiments.management.experiment_command import ExperimentCommand


class Command(ExperimentCommand):
    help = "Coherent and twin-beam SNR time series with the quantum advantage"
    experiment = "snr"
