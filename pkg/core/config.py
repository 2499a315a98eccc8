# smmimo_sim/core/config.py
import os
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

# .env is optional; process environment always wins
env_path = os.path.join(os.path.dirname(__file__), "..", ".env")
env_path = os.path.abspath(env_path)
if os.path.exists(env_path):
    load_dotenv(env_path)


class Settings(BaseSettings):
    APP_NAME: str = "SMMIMO-Sim"
    TOOL_VERSION: str = "0.1.0"
    ENV: str = "development"

    # Logging Configuration
    LOG_LEVEL: str = "INFO"  # DEBUG, INFO, WARNING, ERROR, CRITICAL
    LOG_DIR: str = ""        # Directory for log files (empty string disables file logging)
    LOG_JSON: bool = False   # Use JSON format for logs

    # Monte Carlo execution
    DEFAULT_THREADS: int = 1

    # Service Quanta Unit pricing constants
    SQU_SETUP_SIGNALING: float = 1.0   # message units charged once per flow
    SQU_ENERGY_PER_HOP: float = 1.0    # energy units per volume unit per backbone hop

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()

if __name__ == "__main__":
    print(settings.model_dump())
