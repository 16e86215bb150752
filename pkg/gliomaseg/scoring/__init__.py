from .losses import (dice_loss, dice_score_soft, cross_entropy, log_cosh_dice, dice_ce, one_hot, get_loss, LOSSES,
                     LOSS_ALIASES, foreground_classes)
from .metrics import (RegionSpec, WHOLE, CORE, ENHANCING, REGIONS, REPORT_KEYS, dice_metric, region_dice, case_report,
                      aggregate_reports)
