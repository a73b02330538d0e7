from app.command.base import BaseCommand, CommandFailure, CommandResult
from app.command.boxes import BoxesCommand
from app.command.collection import CommandCollection
from app.command.convert import ConvertCommand
from app.command.datagen import DatagenCommand
from app.command.evaluate import EvalCommand
from app.command.predict import PredictCommand
from app.command.stats import StatsCommand
from app.command.train import TrainCommand
from app.command.validate import ValidateCommand


__all__ = [
    "BaseCommand",
    "CommandResult",
    "CommandFailure",
    "CommandCollection",
    "DatagenCommand",
    "TrainCommand",
    "PredictCommand",
    "BoxesCommand",
    "EvalCommand",
    "ConvertCommand",
    "ValidateCommand",
    "StatsCommand",
]
