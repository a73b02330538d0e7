from app.model.gcn import forward, gradient_check, loss_and_grad
from app.model.ordinal import (
    ClassPrior,
    class_priors,
    decode,
    encode,
    focal_gamma,
    ordinal_ce_loss,
    ordinal_focal_loss,
)
from app.model.params import ModelParams, init_params
from app.model.serialization import TrainedModel, load_model, save_model
from app.model.trainer import predict, predict_many, train


__all__ = [
    "ClassPrior",
    "ModelParams",
    "TrainedModel",
    "encode",
    "decode",
    "ordinal_ce_loss",
    "ordinal_focal_loss",
    "focal_gamma",
    "class_priors",
    "init_params",
    "forward",
    "loss_and_grad",
    "gradient_check",
    "train",
    "predict",
    "predict_many",
    "save_model",
    "load_model",
]
