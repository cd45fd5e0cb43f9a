# utils/config.py
import os
from dotenv import load_dotenv
from pydantic import BaseModel, Field
from pydantic import ConfigDict


class Settings(BaseModel):
    """
    Pydantic model for loading and validating the tunable limits of the
    library. Every exhaustive routine reads its capacity from here unless the
    caller passes an explicit override.
    """
    # --- ORDERING ENGINE ---
    EXACT_MEDIAN_CAP: int = Field(
        20,
        ge=1,
        le=24,
        description="Largest n solved by the subset dynamic program",
    )
    LOCAL_SEARCH_CAP: int = Field(
        4096,
        ge=1,
        description="Largest n for which a dense adjacency matrix is built",
    )

    # --- ORACLES ---
    ORACLE_CAP: int = Field(
        24,
        ge=1,
        description="Largest n for the depth-first power-path oracle",
    )
    ORACLE_CAP_SQUARE: int = Field(
        20,
        ge=1,
        description="Largest n for the k=2 dynamic program",
    )
    ORACLE_RECHECK_CAP: int = Field(
        14,
        ge=1,
        description="Composed size up to which upper bounds are re-checked",
    )
    ELL_EXACT_CAP: int = Field(
        6,
        ge=1,
        description="Largest n enumerated by ell_exact by default",
    )
    ELL_EXACT_LONG_CAP: int = Field(
        7,
        ge=1,
        description="Largest n enumerated when the long-run flag is set",
    )
    AVOIDER_TRIALS: int = Field(
        100_000,
        ge=1,
        description="Default sample budget for the avoider search",
    )

    # --- LOGGING ---
    LOG_LEVEL: str = Field("INFO", description="Console and file log level")
    LOG_DIR: str = Field("logs", description="Directory for rotating logs")
    LOG_TO_FILE: bool = Field(True, description="Attach the file handler")

    model_config = ConfigDict(
        extra="ignore",
        frozen=True,
    )


def load_config() -> Settings:
    """
    Loads environment variables from the .env file and validates them using the
    Settings model.

    Returns:
        Settings: An immutable instance of the library settings.

    Raises:
        ValidationError: If a variable is present but has an invalid value.
    """
    load_dotenv()
    return Settings.model_validate(
        {k: v for k, v in os.environ.items() if k in Settings.model_fields}
    )
