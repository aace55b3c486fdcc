from django.urls import path, include
from rest_framework.routers import DefaultRouter

from .views import PlanAPIView, SimulationRunViewSet

router = DefaultRouter()
router.register(r'runs', SimulationRunViewSet, basename='runs')

urlpatterns = [
    path('plan/', PlanAPIView.as_view(), name='plan'),
    path('', include(router.urls)),
]
