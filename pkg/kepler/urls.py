from django.urls import path
from . import views

urlpatterns = [
    path('runs/', views.runs_list, name='runs_list'),
    path('runs/<int:pk>/', views.run_detail, name='run_detail'),
    path('runs/<int:pk>/report/', views.run_report, name='run_report'),
]
