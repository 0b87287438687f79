"""Learning-rate schedule: linear warm-up, plateau at the peak, then damped cosine arches."""
from dataclasses import dataclass, field
import math


@dataclass
class TrainState:
    epoch: int = 0
    best_val_loss: float = math.inf
    best_epoch: int = -1
    epochs_since_improvement: int = 0
    plateau_epoch: int = None  # first epoch of the decaying phase
    lr_history: list = field(default_factory=list)
    loss_history: list = field(default_factory=list)
    val_history: list = field(default_factory=list)

    def reset_best(self):
        """Forget the best validation loss (the objective changed)."""
        self.best_val_loss = math.inf
        self.best_epoch = -1
        self.epochs_since_improvement = 0

    def record_validation(self, epoch, val_loss, warmup_epochs, patience):
        """Update improvement counters after ``epoch``; returns True on a new best."""
        self.val_history.append(float(val_loss))
        improved = val_loss < self.best_val_loss
        if improved:
            self.best_val_loss = float(val_loss)
            self.best_epoch = epoch
            self.epochs_since_improvement = 0
        else:
            self.epochs_since_improvement += 1
        if (
            self.plateau_epoch is None
            and epoch + 1 >= warmup_epochs
            and self.epochs_since_improvement >= patience
        ):
            self.plateau_epoch = epoch + 1
        self.epoch = epoch + 1
        return improved


def lr_schedule(epoch, state=None, lr_floor=1e-7, lr_peak=0.005251, warmup_epochs=20,
                period=50, decay=0.5):
    """Learning rate for ``epoch`` given the plateau bookkeeping in ``state``."""
    if epoch < warmup_epochs:
        return lr_floor + (lr_peak - lr_floor) * (epoch / warmup_epochs)
    p = None if state is None else state.plateau_epoch
    if p is None or epoch < p:
        return lr_peak
    u = (epoch - p) / period
    return lr_floor + (lr_peak - lr_floor) * decay**u * (1.0 + math.cos(2.0 * math.pi * u)) / 2.0
