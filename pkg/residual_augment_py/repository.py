"""
DuckDB artifact catalog: cached attribute model banks and run history
"""
import os
import json
import logging
from datetime import datetime
from typing import Dict, Any, List, Optional, Sequence

import duckdb
import pandas as pd

from .augment import AttributeModelBank, load_banks, save_banks
from .config import StoreLocation, StoreConfig
from .exceptions import FormatError, StoreError

logger = logging.getLogger(__name__)

CATALOG_FILENAME = "catalog.duckdb"
BANK_DIRNAME = "banks"


class ArtifactStore:
    """DuckDB connection holding the artifact catalog; one shared instance per name"""

    _instances: Dict[str, "ArtifactStore"] = {}

    @classmethod
    def get_instance(cls, config: Optional[StoreConfig] = None, **kwargs) -> "ArtifactStore":
        """Shared catalog for config.name; keyword arguments build a StoreConfig"""
        config = config or StoreConfig(**kwargs)
        store = cls._instances.get(config.name)
        if store is None or store.con is None:
            store = cls._instances[config.name] = cls(config)
        return store

    @classmethod
    def for_cache_dir(cls, cache_dir: str) -> "ArtifactStore":
        """Catalog file living in a cache directory"""
        try:
            os.makedirs(cache_dir, exist_ok=True)
        except OSError as e:
            raise StoreError(f"Cannot create cache directory {cache_dir}: {e}") from e
        filename = os.path.join(os.path.abspath(cache_dir), CATALOG_FILENAME)
        return cls.get_instance(StoreConfig(name=filename, location=StoreLocation.FILE, filename=filename))

    @classmethod
    def release(cls, name: str):
        """Close and forget a named instance"""
        store = cls._instances.pop(name, None)
        if store is not None:
            store.close()

    def __init__(self, config: StoreConfig):
        self.config = config
        database = ":memory:" if config.location is StoreLocation.MEMORY else config.filename
        try:
            self.con = duckdb.connect(database=database, config=dict(config.settings))
        except duckdb.Error as e:
            raise StoreError(f"Cannot open catalog '{config.name}': {e}")

    def _run(self, sql: str, params: Optional[Sequence[Any]]):
        try:
            return self.con.execute(sql, list(params)) if params else self.con.execute(sql)
        except duckdb.Error as e:
            raise StoreError(f"Catalog statement failed: {e}\n  {sql}")

    def execute(self, sql: str, params: Optional[Sequence[Any]] = None):
        return self._run(sql, params)

    def execute_and_fetch(self, sql: str, params: Optional[Sequence[Any]] = None) -> List[tuple]:
        return self._run(sql, params).fetchall()

    def query(self, sql: str, params: Optional[Sequence[Any]] = None) -> pd.DataFrame:
        return self._run(sql, params).df()

    def close(self):
        if self.con is not None:
            self.con.close()
            self.con = None

    def __enter__(self):
        self.execute("BEGIN TRANSACTION")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is not None:
            self.execute("ROLLBACK")
            return False
        try:
            self.execute("COMMIT")
        except StoreError:
            self.execute("ROLLBACK")
            raise


class BaseRepository:
    """One catalog table described by its column definitions"""

    table_name: str = None
    id_field: str = None
    # column name -> SQL type, in table order
    columns: Dict[str, str] = {}

    def __init__(self, store: ArtifactStore = None):
        """Initialize the repository with an optional catalog connection"""
        if not self.table_name or not self.id_field or self.id_field not in self.columns:
            raise StoreError(f"{type(self).__name__} must define table_name, columns and id_field")
        self.db = store or ArtifactStore.get_instance()

    def init(self, drop_if_exists: bool = False):
        """Create the table if it doesn't exist"""
        if drop_if_exists:
            self.db.execute(f"DROP TABLE IF EXISTS {self.table_name}")
        fields = []
        for name, sql_type in self.columns.items():
            field_def = f"{name} {sql_type}"
            if name == self.id_field:
                field_def += " PRIMARY KEY NOT NULL"
            fields.append(field_def)
        self.db.execute(f"CREATE TABLE IF NOT EXISTS {self.table_name} ({', '.join(fields)})")
        return self

    def _row_to_dict(self, row) -> Dict[str, Any]:
        result = {}
        for name, value in zip(self.columns, row):
            if self.columns[name] == "JSON" and isinstance(value, str):
                value = json.loads(value)
            result[name] = value
        return result

    def insert(self, values: Dict[str, Any]):
        """Insert one row; dict and list values are stored as JSON"""
        names = [n for n in self.columns if n in values]
        params = [json.dumps(values[n]) if isinstance(values[n], (dict, list)) else values[n] for n in names]
        placeholders = ", ".join("?" for _ in names)
        self.db.execute(f"INSERT INTO {self.table_name} ({', '.join(names)}) VALUES ({placeholders})", params)

    def exists_by_id(self, id_value) -> bool:
        sql = f"SELECT 1 FROM {self.table_name} WHERE {self.id_field} = ? LIMIT 1"
        return len(self.db.execute_and_fetch(sql, [id_value])) > 0

    def find_by_id(self, id_value) -> Optional[Dict[str, Any]]:
        """Find a row by ID"""
        sql = f"SELECT {', '.join(self.columns)} FROM {self.table_name} WHERE {self.id_field} = ? LIMIT 1"
        rows = self.db.execute_and_fetch(sql, [id_value])
        return self._row_to_dict(rows[0]) if rows else None

    def delete_by_id(self, id_value):
        self.db.execute(f"DELETE FROM {self.table_name} WHERE {self.id_field} = ?", [id_value])

    def count(self) -> int:
        return self.db.execute_and_fetch(f"SELECT COUNT(*) FROM {self.table_name}")[0][0]

    def to_dataframe(self, order_by: Optional[str] = None) -> pd.DataFrame:
        """Export the table to a pandas DataFrame"""
        sql = f"SELECT {', '.join(self.columns)} FROM {self.table_name}"
        if order_by:
            sql += f" ORDER BY {order_by}"
        return self.db.query(sql)


class BankFitnessRepository(BaseRepository):
    """Held-out R² of every attribute model in a cached bank set"""

    table_name = "bank_fitness"
    id_field = "entry_id"
    columns = {
        "entry_id": "VARCHAR",
        "cache_key": "VARCHAR",
        "bank": "VARCHAR",
        "attribute": "VARCHAR",
        "r_squared": "DOUBLE",
        "tss": "DOUBLE",
        "rss": "DOUBLE",
    }

    def save_all(self, cache_key: str, banks: Sequence[AttributeModelBank]):
        for bank in banks:
            for row in bank.fitness_table():
                self.insert({"entry_id": f"{cache_key}/{row['bank']}/{row['attribute']}",
                             "cache_key": cache_key, **row})

    def delete_for(self, cache_key: str):
        self.db.execute(f"DELETE FROM {self.table_name} WHERE cache_key = ?", [cache_key])

    def find_for(self, cache_key: str) -> pd.DataFrame:
        sql = (f"SELECT bank, attribute, r_squared, tss, rss FROM {self.table_name} "
               f"WHERE cache_key = ? ORDER BY entry_id")
        return self.db.query(sql, [cache_key])


class BankCacheRepository(BaseRepository):
    """
    Cache of trained banks keyed by (augmentation config, round, input table)

    Banks live in .npz files under <cache_dir>/banks; the catalog maps cache keys to them.
    """

    table_name = "attribute_banks"
    id_field = "cache_key"
    columns = {
        "cache_key": "VARCHAR",
        "bank_file": "VARCHAR",
        "n_banks": "INTEGER",
        "n_models": "INTEGER",
        "meta": "JSON",
        "created_at": "TIMESTAMP",
    }

    def __init__(self, cache_dir: str, store: ArtifactStore = None):
        """
        Initialize the bank cache

        Args:
            cache_dir: Directory holding bank files
            store: Catalog connection; defaults to the catalog file inside cache_dir
        """
        super().__init__(store or ArtifactStore.for_cache_dir(cache_dir))
        self.bank_dir = os.path.abspath(os.path.join(cache_dir, BANK_DIRNAME))
        self.fitness = BankFitnessRepository(self.db)
        self.hits = 0
        self.misses = 0

    def init(self, drop_if_exists: bool = False):
        super().init(drop_if_exists)
        self.fitness.init(drop_if_exists)
        os.makedirs(self.bank_dir, exist_ok=True)
        return self

    def path_for(self, cache_key: str) -> str:
        return os.path.join(self.bank_dir, f"{cache_key}.npz")

    def exists(self, cache_key: str) -> bool:
        row = self.find_by_id(cache_key)
        return row is not None and os.path.exists(row["bank_file"])

    def find(self, cache_key: str) -> Optional[List[AttributeModelBank]]:
        """Cached banks, or None when absent or unreadable"""
        row = self.find_by_id(cache_key)
        if row is None:
            self.misses += 1
            return None
        try:
            banks = load_banks(row["bank_file"])
        except FormatError as e:
            logger.warning("Discarding cache entry %s: %s", cache_key, e)
            self.remove(cache_key)
            self.misses += 1
            return None
        self.hits += 1
        return banks

    def save(self, cache_key: str, banks: Sequence[AttributeModelBank]):
        """Write the bank file, then record it with its fitness rows"""
        os.makedirs(self.bank_dir, exist_ok=True)
        path = self.path_for(cache_key)
        tmp = path + ".tmp"
        save_banks(tmp, banks)
        os.replace(tmp, path)
        with self.db:
            self.delete_by_id(cache_key)
            self.fitness.delete_for(cache_key)
            self.insert({
                "cache_key": cache_key,
                "bank_file": path,
                "n_banks": len(banks),
                "n_models": sum(len(b) for b in banks),
                "meta": {"suffixes": [b.suffix for b in banks], "attributes": len(banks[0]) if banks else 0},
                "created_at": datetime.now(),
            })
            self.fitness.save_all(cache_key, banks)
        logger.debug("Cached %d banks under %s", len(banks), cache_key)

    def remove(self, cache_key: str):
        row = self.find_by_id(cache_key)
        with self.db:
            self.delete_by_id(cache_key)
            self.fitness.delete_for(cache_key)
        if row is not None and os.path.exists(row["bank_file"]):
            os.remove(row["bank_file"])


class ReportRepository(BaseRepository):
    """History of completed runs"""

    table_name = "run_history"
    id_field = "run_id"
    columns = {
        "run_id": "VARCHAR",
        "config_hash": "VARCHAR",
        "target": "VARCHAR",
        "task": "VARCHAR",
        "mode": "VARCHAR",
        "baseline": "DOUBLE",
        "augmented": "DOUBLE",
        "improved": "BOOLEAN",
        "n_columns": "INTEGER",
        "report_path": "VARCHAR",
        "created_at": "TIMESTAMP",
    }

    def save(self, report, config_hash: str, mode: str, report_path: str,
             created_at: Optional[datetime] = None) -> str:
        """Record a ComparisonReport; returns the run id"""
        created_at = created_at or datetime.now()
        run_id = f"{config_hash}-{created_at.strftime('%Y%m%dT%H%M%S%f')}"
        self.insert({
            "run_id": run_id,
            "config_hash": config_hash,
            "target": report.target,
            "task": report.task.value,
            "mode": mode,
            "baseline": report.baseline.headline,
            "augmented": report.augmented.headline,
            "improved": report.improved,
            "n_columns": report.shapes.get("augmented", {}).get("columns"),
            "report_path": report_path,
            "created_at": created_at,
        })
        return run_id

    def history(self, limit: Optional[int] = None) -> pd.DataFrame:
        """Runs in chronological order"""
        frame = self.to_dataframe(order_by="created_at, run_id")
        return frame.tail(limit) if limit else frame
