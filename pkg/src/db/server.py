"""
File: server.py
File-Path: src/db/server.py
Author: coldmap maintainers
Date-Created: 10-18-2026

Description:
    run registry connection handler

Inputs:
    - .env (COLDMAP_DB_URL)
    - sqlite / any SQLAlchemy URL

Outputs:
    - engine and sessions for the registry tables
"""

import os

from dotenv import load_dotenv
from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from helpers.logging_helper import get_logger

# load env
load_dotenv()

DEFAULT_DB_URL = "sqlite:///coldmap_runs.db"
DATABASE_URL = os.getenv("COLDMAP_DB_URL", DEFAULT_DB_URL)
MEMORY_URLS = ("sqlite://", "sqlite:///:memory:")

Base = declarative_base()
logger = get_logger('db')

engine = None
SessionLocal = None


def configure_database(url: str = None):
    """(re)binds the engine; called lazily so importing the registry never connects"""
    global engine, SessionLocal
    url = url or DATABASE_URL
    if url in MEMORY_URLS:
        # one shared connection, otherwise every session sees an empty database
        engine = create_engine(url, future=True, poolclass=StaticPool,
                               connect_args={"check_same_thread": False})
    else:
        engine = create_engine(url, future=True)
    SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    return engine


def get_session():
    """Get a database session"""
    if SessionLocal is None:
        configure_database()
    return SessionLocal()


def init_database(url: str = None) -> bool:
    """Initialize registry tables"""
    if url is not None or engine is None:
        configure_database(url)
    try:
        # import the tables so they register on Base.metadata
        from db.schema import ExperimentRun, MetricRecord
        Base.metadata.create_all(bind=engine, checkfirst=True)
        logger.info(f"registry ready | url={engine.url.render_as_string(hide_password=True)}")
        return True

    except Exception as error:
        logger.error(f"registry unavailable | url={engine.url} | error={error}")
        return False
