"""
Catálogo de modelos y precios por consulta

El precio es la suma de entrada + salida por millón de tokens.
"""

from typing import Any, Dict, List, Optional

from core.errors import ConfigError

PRICE_TABLE = {
    'gpt-4o': 12.50,
    'gemini-2.5-flash': 0.75,
    'claude-opus-4': 90.00,
    'deepseek-chat': 1.37,
    'qwen-plus': 1.60,
    'claude-sonnet-4': 18.00,
}


class ModelCatalog:
    """Catálogo de modelos con precio fijo por consulta"""

    def __init__(self, prices: Optional[Dict[str, float]] = None):
        prices = PRICE_TABLE if prices is None else prices
        self.available_models = [{'name': name, 'price': float(price)} for name, price in prices.items()]

    def is_model_available(self, model_name: str) -> bool:
        return any(model['name'] == model_name for model in self.available_models)

    def get_model_info(self, model_name: str) -> Optional[Dict[str, Any]]:
        for model in self.available_models:
            if model['name'] == model_name:
                return model
        return None

    def list_models(self) -> List[Dict[str, Any]]:
        """Modelos ordenados de más barato a más caro"""
        return sorted(self.available_models, key=lambda m: (m['price'], m['name']))

    def get_price(self, model_name: str, key: str = "env.arms.model") -> float:
        """
        Precio de un modelo

        Raises:
            ConfigError: Si el modelo no está en el catálogo
        """
        info = self.get_model_info(model_name)
        if info is None:
            known = ", ".join(m['name'] for m in self.list_models())
            raise ConfigError(f"modelo desconocido '{model_name}' (conocidos: {known})", key=key)
        return info['price']
